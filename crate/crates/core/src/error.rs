use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("enumeration cap exceeded: {needed} entries requested, cap is {cap}")]
    Resource { needed: u128, cap: u64 },
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

/// Upper bound on the number of entries any exhaustive enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cap(pub u64);

impl Cap {
    pub const DEFAULT: Cap = Cap(10_000_000);

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::Resource { needed, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Cap {
    fn default() -> Self {
        Cap::DEFAULT
    }
}
