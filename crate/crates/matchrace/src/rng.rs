use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name of the generator recorded in trace headers.
pub const RNG_ALGORITHM: &str = "chacha8(seed_from_u64)";
/// Name of the uniform-to-normal transform recorded in trace headers.
pub const NORMAL_TRANSFORM: &str = "box-muller-cos(2xu64)";

/// Deterministic random source for wind simulation.
///
/// Wraps ChaCha8 seeded via `seed_from_u64` and derives standard normals with
/// the Box-Muller cosine branch:
///
///   u = ((x >> 11) + 1) * 2^-53          for x a raw u64 draw, so u in (0, 1]
///   z = sqrt(-2 ln u1) * cos(2 pi u2)
///
/// Every normal consumes exactly two u64 draws, which makes traces
/// reproducible across platforms and library versions: nothing about the
/// stream layout is delegated to a distributions crate.
pub struct WindRng {
    inner: ChaCha8Rng,
}

impl WindRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        WindRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Raw generator output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on the half-open interval (0, 1], using the top 53 bits.
    /// Excluding 0 keeps ln(u) finite.
    #[inline]
    pub fn uniform_unit(&mut self) -> f64 {
        let x = self.next_u64();
        ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal variate (Box-Muller, cosine branch).
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_unit();
        let u2 = self.uniform_unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
