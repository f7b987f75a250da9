use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("the Luby sequence is indexed from 1")]
pub struct LubyError;

/// The `i`-th term (1-based) of the Luby sequence 1,1,2,1,1,2,4,1,...
///
/// `luby(2^k - 1) = 2^(k-1)`; otherwise `luby(i) = luby(i - 2^(k-1) + 1)` for
/// `2^(k-1) <= i < 2^k - 1`.
pub fn luby(i: u64) -> Result<u64, LubyError> {
    if i == 0 {
        return Err(LubyError);
    }
    let mut i = i as u128;
    loop {
        if (i + 1).is_power_of_two() {
            return Ok(i.div_ceil(2) as u64);
        }
        let half = 1u128 << (127 - i.leading_zeros());
        i = i - half + 1;
    }
}
