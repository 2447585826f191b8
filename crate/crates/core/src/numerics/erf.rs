/// Error function, `erf(x) = 2/√π ∫₀ˣ exp(-t²) dt`.
///
/// Backed by the fdlibm rational approximations (via `libm`), which are
/// accurate to within an ulp or two over the whole real line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, without cancellation for large `x`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
