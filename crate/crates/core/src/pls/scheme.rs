use crate::config::saturating_pow;
use crate::model::rational::uint;
use crate::model::{Instance, Rational, Valuations};
use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use std::cell::RefCell;
use std::collections::HashMap;

/// The `(1+ε)` price grid for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonScheme {
    pub epsilon: Rational,
    pub vmax: u64,
    pub pmax: Rational,
    /// Largest `q` with `(1+ε)^q <= pmax`.
    pub max_exponent: u64,
    /// `1 + ε = base_num / base_den` in lowest terms.
    pub base_num: BigUint,
    pub base_den: BigUint,
}

impl EpsilonScheme {
    /// `ε = 1/(12·m³·v_max⁴)`, small enough that ε-pEF1 implies EF1.
    pub fn strict(instance: &Instance) -> Self {
        let m = instance.goods() as u64;
        let vmax = instance.vmax();
        let denom = 12u64
            .saturating_mul(saturating_pow(m, 3))
            .saturating_mul(saturating_pow(vmax, 4));
        Self::with_epsilon(instance, Rational::one() / uint(denom))
    }

    /// `ε = 1/(3·m·v_max)`: the largest grid that still turns ε-pEF1 on MBB
    /// into EF1, since `(1+ε)² < 1 + 1/(m·v_max)`. Pareto optimality of
    /// fixpoints is not implied and must be re-checked on the original values.
    pub fn test_mode(instance: &Instance) -> Self {
        let denom = 3u64
            .saturating_mul(instance.goods() as u64)
            .saturating_mul(instance.vmax());
        Self::with_epsilon(instance, Rational::one() / uint(denom))
    }

    /// Any positive ε; fixpoints must then be re-checked on the original values.
    pub fn with_epsilon(instance: &Instance, epsilon: Rational) -> Self {
        assert!(epsilon > Rational::zero(), "epsilon must be positive");
        let base = Rational::one() + &epsilon;
        let base_num = base.numer().magnitude().clone();
        let base_den = base.denom().magnitude().clone();
        let pmax = price_bound(instance);
        let max_exponent = largest_power_at_most(&base_num, &base_den, &pmax);
        EpsilonScheme {
            epsilon,
            vmax: instance.vmax(),
            pmax,
            max_exponent,
            base_num,
            base_den,
        }
    }

    /// `(1+ε)^e` as a rational.
    pub fn power(&self, e: u64) -> Rational {
        let num: BigUint = Pow::pow(&self.base_num, e);
        let den: BigUint = Pow::pow(&self.base_den, e);
        // powers of a fraction in lowest terms stay in lowest terms
        Rational::new_raw(num.into(), den.into())
    }

    /// Grid exponent of a positive integer value: `⌊log_{1+ε} v⌋`.
    pub fn round_exponent(&self, value: u64) -> u64 {
        largest_power_at_most(&self.base_num, &self.base_den, &uint(value))
    }

    /// Smallest `k >= 0` with `(1+ε)^k · x >= y`; `None` if `x = 0 < y`.
    pub fn smallest_step(&self, x: &BigUint, y: &BigUint) -> Option<u64> {
        if x >= y {
            return Some(0);
        }
        if x.is_zero() {
            return None;
        }
        let reaches = |k: u64| -> bool {
            let lhs: BigUint = Pow::pow(&self.base_num, k);
            let rhs: BigUint = Pow::pow(&self.base_den, k);
            lhs * x >= rhs * y
        };
        let mut hi = 1u64;
        while !reaches(hi) {
            hi *= 2;
        }
        let mut lo = hi / 2;
        // reaches(hi) and !reaches(lo)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if reaches(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// Price ceiling `2·(m·v_max)^n`.
pub fn price_bound(instance: &Instance) -> Rational {
    let base = (instance.goods() as u64).saturating_mul(instance.vmax());
    let mut bound = BigUint::from(2u32);
    for _ in 0..instance.agents() {
        bound *= base;
    }
    Rational::from_integer(bound.into())
}

/// Largest `e >= 0` with `(num/den)^e <= x`, for `num > den` and `x >= 1`,
/// by doubling then bisection on exact powers.
pub fn largest_power_at_most(num: &BigUint, den: &BigUint, x: &Rational) -> u64 {
    let xn = x.numer().magnitude();
    let xd = x.denom().magnitude();
    let fits = |e: u64| -> bool {
        let lhs: BigUint = Pow::pow(num, e);
        let rhs: BigUint = Pow::pow(den, e);
        lhs * xd <= rhs * xn
    };
    debug_assert!(fits(0));
    let mut hi = 1u64;
    while fits(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Rounded values `(1+ε)^{⌊log_{1+ε} v⌋}`, zero where `v = 0`.
pub fn round_valuations(instance: &Instance, scheme: &EpsilonScheme) -> Vec<Vec<Rational>> {
    let rounded = RoundedInstance::new(instance, scheme);
    rounded.values
}

/// An instance with every positive value replaced by its grid rounding.
#[derive(Debug, Clone)]
pub struct RoundedInstance {
    /// `exponents[i][j]` is `None` where `v_ij = 0`.
    pub exponents: Vec<Vec<Option<u64>>>,
    pub values: Vec<Vec<Rational>>,
}

impl RoundedInstance {
    pub fn new(instance: &Instance, scheme: &EpsilonScheme) -> Self {
        let mut by_value: HashMap<u64, u64> = HashMap::new();
        let exponents: Vec<Vec<Option<u64>>> = instance
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| (v > 0).then(|| *by_value.entry(v).or_insert_with(|| scheme.round_exponent(v))))
                    .collect()
            })
            .collect();
        let mut powers: HashMap<u64, Rational> = HashMap::new();
        let values = exponents
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        Some(e) => powers.entry(*e).or_insert_with(|| scheme.power(*e)).clone(),
                        None => Rational::zero(),
                    })
                    .collect()
            })
            .collect();
        RoundedInstance { exponents, values }
    }
}

impl Valuations for RoundedInstance {
    type Value = Rational;

    fn agent_count(&self) -> usize {
        self.values.len()
    }

    fn good_count(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    fn value(&self, agent: usize, good: usize) -> Rational {
        self.values[agent][good].clone()
    }

    fn value_rational(&self, agent: usize, good: usize) -> Rational {
        self.values[agent][good].clone()
    }

    fn is_positive(&self, agent: usize, good: usize) -> bool {
        self.exponents[agent][good].is_some()
    }
}

/// Memoized powers of the grid numerator and denominator.
#[derive(Debug)]
pub(crate) struct PowerCache<'a> {
    scheme: &'a EpsilonScheme,
    num: RefCell<HashMap<u64, BigUint>>,
    den: RefCell<HashMap<u64, BigUint>>,
}

impl<'a> PowerCache<'a> {
    const LIMIT: usize = 4096;

    pub(crate) fn new(scheme: &'a EpsilonScheme) -> Self {
        PowerCache {
            scheme,
            num: RefCell::new(HashMap::new()),
            den: RefCell::new(HashMap::new()),
        }
    }

    pub(crate) fn num(&self, e: u64) -> BigUint {
        Self::get(&self.num, &self.scheme.base_num, e)
    }

    pub(crate) fn den(&self, e: u64) -> BigUint {
        Self::get(&self.den, &self.scheme.base_den, e)
    }

    fn get(cache: &RefCell<HashMap<u64, BigUint>>, base: &BigUint, e: u64) -> BigUint {
        let mut cache = cache.borrow_mut();
        if cache.len() > Self::LIMIT {
            cache.clear();
        }
        cache.entry(e).or_insert_with(|| Pow::pow(base, e)).clone()
    }
}
