use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use spinwave_cli::config::{read_file, resolve, Overrides};
use spinwave_cli::experiments::ALL;
use spinwave_cli::fitting::{fit_series, read_series, Law};
use spinwave_cli::{run, CliError, Result};

/// Every parameter key across the experiment schemas, with the experiments using it.
fn parameter_keys() -> BTreeMap<&'static str, (String, Vec<&'static str>)> {
    let mut keys: BTreeMap<&'static str, (String, Vec<&'static str>)> = BTreeMap::new();
    for e in ALL {
        for k in e.schema() {
            let entry = keys
                .entry(k.name)
                .or_insert_with(|| (k.help.to_string(), Vec::new()));
            entry.1.push(e.name());
        }
    }
    keys
}

fn command() -> Command {
    let names: Vec<&str> = ALL.iter().map(|e| e.name()).collect();
    let mut run_cmd = Command::new("run")
        .about("Run a named experiment and write manifest.json, summary.json and data/*.csv")
        .after_help(format!("Experiments: {}", names.join(", ")))
        .arg(
            Arg::new("name")
                .value_name("EXPERIMENT")
                .help("experiment name (same as --experiment)"),
        )
        .arg(
            Arg::new("experiment")
                .long("experiment")
                .value_name("NAME")
                .help("experiment name"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .value_parser(value_parser!(PathBuf))
                .help("TOML config; flags win"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .value_parser(value_parser!(PathBuf))
                .help("output directory"),
        )
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .value_name("N")
                .value_parser(value_parser!(usize))
                .help("worker threads for sweeps"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("N")
                .value_parser(value_parser!(u64))
                .help("reserved; runs are deterministic"),
        )
        .next_help_heading("Experiment parameters");
    for (key, (help, users)) in parameter_keys() {
        run_cmd = run_cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(format!("{help} [{}]", users.join(", "))),
        );
    }
    Command::new("spinwave")
        .about("Collective emission of atomic arrays: experiment runner")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(run_cmd)
        .subcommand(
            Command::new("fit")
                .about("Fit a power, exponential or Lorentzian law to two CSV columns")
                .arg(
                    Arg::new("csv")
                        .required(true)
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(Arg::new("law").long("law").required(true).value_parser([
                    "power",
                    "exponential",
                    "lorentzian",
                ]))
                .arg(
                    Arg::new("x")
                        .long("x")
                        .default_value("0")
                        .help("x column, by header or index"),
                )
                .arg(
                    Arg::new("y")
                        .long("y")
                        .default_value("1")
                        .help("y column, by header or index"),
                ),
        )
        .subcommand(
            Command::new("list")
                .about("List experiments and their parameters")
                .arg(
                    Arg::new("verbose")
                        .short('v')
                        .long("verbose")
                        .action(ArgAction::SetTrue),
                ),
        )
}

fn run_command(m: &ArgMatches) -> Result<()> {
    let positional = m.get_one::<String>("name").cloned();
    let flag = m.get_one::<String>("experiment").cloned();
    if let (Some(a), Some(b)) = (&positional, &flag) {
        if a != b {
            return Err(CliError::schema(format!(
                "experiment: `{a}` and --experiment `{b}` disagree"
            )));
        }
    }
    let file = m
        .get_one::<PathBuf>("config")
        .map(|p| read_file(p))
        .transpose()?;
    let parameters = parameter_keys()
        .keys()
        .filter_map(|k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    let overrides = Overrides {
        experiment: flag.or(positional),
        output: m.get_one::<PathBuf>("out").cloned(),
        seed: m.get_one::<u64>("seed").copied(),
        parameters,
    };
    let config = resolve(file, overrides)?;
    let jobs = m
        .get_one::<usize>("jobs")
        .copied()
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = run(&config, jobs)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    eprintln!("wrote {}", config.output.display());
    Ok(())
}

fn fit_command(m: &ArgMatches) -> Result<()> {
    let law: Law = m.get_one::<String>("law").expect("required").parse()?;
    let path = m.get_one::<PathBuf>("csv").expect("required");
    let (x, y) = read_series(
        path,
        m.get_one::<String>("x").expect("default"),
        m.get_one::<String>("y").expect("default"),
    )?;
    println!(
        "{}",
        serde_json::to_string_pretty(&fit_series(&x, &y, law)?)?
    );
    Ok(())
}

fn list_command(m: &ArgMatches) {
    for e in ALL {
        println!("{:<20} {}", e.name(), e.target());
        if m.get_flag("verbose") {
            for k in e.schema() {
                println!(
                    "    --{:<16} {} (default {}; {})",
                    k.name,
                    k.help,
                    k.default,
                    k.kind.describe()
                );
            }
        }
    }
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match matches.subcommand() {
        Some(("run", m)) => run_command(m),
        Some(("fit", m)) => fit_command(m),
        Some(("list", m)) => {
            list_command(m);
            Ok(())
        }
        _ => unreachable!("subcommand is required"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
