//! Binomial-coefficient congruence kernels and the primality criteria built
//! on them.
//!
//! The central fact exercised here: if `C(n-1, k) ≡ (-1)^k (mod q)` for every
//! `k` in `0..n`, then `q` is prime and `n` is a power of `q`. The
//! [`criteria`] module classifies pairs `(n, q)` against that statement and
//! hosts the classical binomial primality tests; [`verify`] machine-checks
//! the supporting congruences over parameter grids.

pub mod arith;
pub mod binomial;
pub mod criteria;
pub mod error;
pub mod row;
pub mod verify;

pub use arith::{
    crt_combine, digits, factorize, integer_sqrt, is_prime, mod_inverse, perfect_power_of,
    DigitExpansion, Factorization, PrimePower,
};
pub use binomial::{
    binom_exact, binom_mod, binom_mod_prime, binom_mod_prime_power, kummer_valuation,
    neg_one_pow, BinomialModulus, PrimePowerBinomial,
};
pub use criteria::{
    babbage_test, cai_granville_test, deutsch_gessel_test, gould_greig_test,
    lucas_congruence_check, mann_shanks_test, piza_test, theorem_classify, ClassificationResult,
    Criterion, CriterionVerdict, ModulusForm, ScanMode, Witness,
};
pub use error::{Error, Result};
pub use row::{row_stream, RatioTracker, RowCursor};
pub use verify::{
    converse_scan, run_suite, verify_eq21, verify_lemma, verify_lemma_chain, verify_proposition,
    CongruenceRecord, Location, Params, Suite, SuiteGrid, SuiteReport, Totals,
};
