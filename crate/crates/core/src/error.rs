use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {value} (expected {expected})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("no interior maximum found after {expansions} bracket expansions")]
    NoInteriorMaximum { expansions: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}

/// Accepts a probability in `[0, 1]`; rejects NaN.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    check((0.0..=1.0).contains(&value), name, value, "a probability in [0, 1]")
}
