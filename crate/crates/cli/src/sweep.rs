//! Sweep points on a worker pool, checkpointed one file per point so an
//! interrupted run picks up where it stopped.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub struct Runner {
    pool: rayon::ThreadPool,
    checkpoints: Option<PathBuf>,
    /// Identifies the resolved configuration; checkpoints from another
    /// configuration are ignored.
    fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<T> {
    fingerprint: String,
    value: T,
}

impl Runner {
    pub fn new(jobs: usize, checkpoints: Option<PathBuf>, fingerprint: String) -> Result<Runner> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| CliError::schema(format!("jobs: cannot start {jobs} workers: {e}")))?;
        Ok(Runner {
            pool,
            checkpoints,
            fingerprint,
        })
    }

    /// Runner without checkpoints, for library callers.
    pub fn in_memory(jobs: usize) -> Result<Runner> {
        Runner::new(jobs, None, String::new())
    }

    fn path(&self, name: &str, index: usize) -> Option<PathBuf> {
        self.checkpoints
            .as_ref()
            .map(|d| d.join(format!("{name}-{index:04}.json")))
    }

    fn load<T: DeserializeOwned>(&self, name: &str, index: usize) -> Option<T> {
        let text = fs::read_to_string(self.path(name, index)?).ok()?;
        let cp: Checkpoint<T> = serde_json::from_str(&text).ok()?;
        (cp.fingerprint == self.fingerprint).then_some(cp.value)
    }

    fn store<T: Serialize>(&self, name: &str, index: usize, value: &T) -> Result<()> {
        let Some(path) = self.path(name, index) else {
            return Ok(());
        };
        let cp = Checkpoint {
            fingerprint: self.fingerprint.clone(),
            value,
        };
        // Write then rename so a killed run never leaves a truncated file.
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(&cp)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Evaluates `f` on every point, in parallel, returning results in order.
    pub fn sweep<P, T, F>(&self, name: &str, points: &[P], f: F) -> Result<Vec<T>>
    where
        P: Sync,
        T: Serialize + DeserializeOwned + Send,
        F: Fn(&P) -> Result<T> + Sync,
    {
        if let Some(dir) = &self.checkpoints {
            fs::create_dir_all(dir)?;
        }
        self.pool.install(|| {
            points
                .par_iter()
                .enumerate()
                .map(|(i, p)| {
                    if let Some(v) = self.load(name, i) {
                        return Ok(v);
                    }
                    let v = f(p)?;
                    self.store(name, i, &v)?;
                    Ok(v)
                })
                .collect()
        })
    }

    /// Removes the checkpoint directory after a completed run.
    pub fn finish(&self) -> Result<()> {
        if let Some(dir) = &self.checkpoints {
            if dir.exists() {
                fs::remove_dir_all(dir)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn results_keep_point_order() {
        let r = Runner::in_memory(3).unwrap();
        let out = r.sweep("sq", &[1, 2, 3, 4, 5], |&x| Ok(x * x)).unwrap();
        assert_eq!(out, vec![1, 4, 9, 16, 25]);
    }

    #[test]
    fn checkpoints_skip_finished_points() {
        let dir = tempfile::tempdir().unwrap();
        let calls = AtomicUsize::new(0);
        let f = |&x: &u32| {
            calls.fetch_add(1, Ordering::SeqCst);
            if x == 3 {
                Err(CliError::Degenerate("boom".into()))
            } else {
                Ok(x)
            }
        };
        let r = Runner::new(1, Some(dir.path().join("cp")), "a".into()).unwrap();
        assert!(r.sweep("s", &[1, 2, 3], f).is_err());
        let before = calls.load(Ordering::SeqCst);
        // Resumed run: the two finished points come from disk.
        let out = r.sweep("s", &[1, 2, 4], f).unwrap();
        assert_eq!(out, vec![1, 2, 4]);
        assert_eq!(calls.load(Ordering::SeqCst) - before, 1);
        // A different configuration does not reuse them.
        let other = Runner::new(1, Some(dir.path().join("cp")), "b".into()).unwrap();
        other.sweep("s", &[1, 2, 4], f).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst) - before, 4);
        other.finish().unwrap();
        assert!(!dir.path().join("cp").exists());
    }
}
