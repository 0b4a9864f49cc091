//! Exit codes and the error type every command returns.

use std::fmt;

/// Success, or a separable / PPT / certified answer.
pub const OK: u8 = 0;
/// Entangled, NPT, inconclusive certificate, or failed verification.
pub const NEGATIVE: u8 = 1;
/// The answer lies inside the tolerance band around the PPT boundary.
pub const AMBIGUOUS: u8 = 2;
/// Bad command line, unreadable or malformed input file.
pub const USAGE: u8 = 64;
/// Well-formed input that is not a valid operator for the request.
pub const DATA: u8 = 65;
/// Internal numerical failure.
pub const SOFTWARE: u8 = 70;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: DATA, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Input problems map to [`DATA`], everything else to [`SOFTWARE`].
pub fn classify(err: &sep2n::Error) -> u8 {
    use sep2n::Error::*;
    match err {
        NotSquare { .. }
        | NotHermitian { .. }
        | NotPsd { .. }
        | NonFinite
        | DimensionMismatch { .. }
        | NonPositiveTrace { .. }
        | InvalidArgument(_)
        | NotPtInvariant { .. }
        | NotSymmetricUnitary { .. }
        | TwistedInvarianceFailed { .. }
        | RankTooLarge { .. } => DATA,
        _ => SOFTWARE,
    }
}

impl From<sep2n::Error> for Failure {
    fn from(err: sep2n::Error) -> Self {
        Self { code: classify(&err), message: err.to_string() }
    }
}
