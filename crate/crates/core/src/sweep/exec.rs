use crate::error::{Error, Result};

/// Caps the worker count of parallel sweeps.
pub const THREADS_ENV: &str = "RIEMANN_FLOW_THREADS";

/// How independent work items are run. Results always come back in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// On the global pool.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    /// Parallel unless `RIEMANN_FLOW_THREADS` says otherwise; `1` means serial.
    pub fn from_env() -> Result<Self> {
        match std::env::var(THREADS_ENV) {
            Err(_) => Ok(Execution::Parallel),
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(0) | Err(_) => Err(Error::Config(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))),
                Ok(1) => Ok(Execution::Serial),
                Ok(n) => Ok(Execution::Workers(n)),
            },
        }
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Serial => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Execution::Workers(n) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                    Err(_) => items.iter().map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::Workers(_) => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..200).collect();
        let slow_square = |&k: &u64| {
            std::thread::sleep(std::time::Duration::from_micros(200 - k));
            k * k
        };
        let serial = Execution::Serial.map(&items, slow_square);
        assert_eq!(Execution::Parallel.map(&items, slow_square), serial);
        assert_eq!(Execution::Workers(3).map(&items, slow_square), serial);
    }
}
