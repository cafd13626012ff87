use std::fmt::Debug;

use num_traits::{Float, FloatConst};

/// Real scalar the simulator is generic over.
///
/// `tolerance` is the looseness used by validation checks (unitarity,
/// normalisation); it is scaled to the precision of the type.
pub trait Scalar: Float + FloatConst + Debug + Send + Sync + 'static {
    fn tolerance() -> Self;

    fn from_f64(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}
