use crate::{Error, Result};

/// Cap on the number of matrix entries (or enumeration candidates) a single
/// computation may allocate. Catalog-scale inputs sit far below the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_entries: u64,
}

pub const DEFAULT_MAX_ENTRIES: u64 = 10_000_000;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

impl Budget {
    pub fn new(max_entries: u64) -> Self {
        Budget { max_entries }
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.max_entries as u128 {
            return Err(Error::BudgetExceeded {
                needed,
                limit: self.max_entries,
            });
        }
        Ok(())
    }

    pub fn check_enumeration(&self, candidates: u128) -> Result<()> {
        if candidates > self.max_entries as u128 {
            return Err(Error::EnumerationTooLarge {
                candidates,
                limit: self.max_entries,
            });
        }
        Ok(())
    }
}
