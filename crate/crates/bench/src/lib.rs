//! Fixed inputs shared by the benchmarks.

use floorsum_core::ArithFnSpec;

/// `x` values for the block-sum benchmarks.
pub const SUM_XS: [u64; 3] = [1_000_000, 100_000_000, 10_000_000_000];

/// Sieve limits.
pub const SIEVE_LIMITS: [u64; 2] = [100_000, 10_000_000];

/// Composite and prime inputs near the top of the factorization range.
pub const FACTOR_INPUTS: [(&str, u64); 3] = [
    ("semiprime_2^62", 2_147_483_647 * 2_147_483_629),
    ("prime_2^61", 2_305_843_009_213_693_951),
    (
        "smooth",
        2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43 * 47,
    ),
];

pub fn bench_specs() -> Vec<ArithFnSpec> {
    [
        "phi",
        "tau:3",
        "digit-sum:10",
        "phi-over-n",
        "lambda-omega:1.7320508075688772",
    ]
    .iter()
    .map(|s| s.parse().expect("built-in spec"))
    .collect()
}
