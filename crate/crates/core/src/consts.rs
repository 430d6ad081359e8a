//! Hard-coded mathematical constants (16 significant digits).

/// zeta(2) = pi^2 / 6 = 1.6449340668482264364724...
pub const ZETA2: f64 = 1.644_934_066_848_226_4;

/// 1 / zeta(2) = 6 / pi^2 = 0.6079271018540266286632...
pub const INV_ZETA2: f64 = 0.607_927_101_854_026_6;

/// Euler-Mascheroni constant, 0.5772156649015328606065...
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Golden ratio (1 + sqrt 5) / 2.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;
