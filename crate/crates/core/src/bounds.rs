//! Closed-form quantities: weights, weight bounds and the lower bounds built
//! from them for the bounded-query game.
//!
//! Every `min { q : ... }` scan uses exact integers. Floating point only
//! enters the log-estimate sandwich and the large-`n` applicability threshold,
//! and the threshold is rounded up before it is compared with `n`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameState;

/// Exact value evaluator for the unrestricted game: `(lies, state) -> value`.
pub type BasicEvaluator<'a> = dyn Fn(usize, &GameState) -> Result<u32> + Sync + 'a;

/// `(n * i) mod k`.
pub fn remainder_m(n: u64, k: u64, i: u64) -> u64 {
    assert!(k >= 1 && i >= 1, "remainder_m needs k >= 1 and i >= 1");
    (n * i) % k
}

/// `ceil(log2 x)` for `x >= 1`, as the bit length of `x - 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    u64::BITS - (x - 1).leading_zeros()
}

/// `sum_{j=0}^{l} C(q, j)`.
pub fn binom_le(q: u32, l: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for j in 1..=l as u32 {
        if j > q {
            break;
        }
        term = term * (q - j + 1) / j;
        sum += &term;
    }
    sum
}

/// `w_q(x) = sum_i C(q, <= l - i) * x_i`.
pub fn state_weight(state: &GameState, q: u32) -> BigUint {
    let counts = state.counts();
    let lies = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| binom_le(q, lies - i) * x)
        .fold(BigUint::zero(), |acc, w| acc + w)
}

fn pow2(q: u32) -> BigUint {
    BigUint::one() << q as usize
}

/// Hamming-type weight bound `min { q : n * C(q, <= l) <= 2^q }`.
pub fn weight_bound(n: u64, lies: usize) -> u32 {
    assert!(n >= 1, "weight bound of an empty set");
    let n = BigUint::from(n);
    (0..)
        .find(|&q| &n * binom_le(q, lies) <= pow2(q))
        .expect("2^q eventually dominates a polynomial")
}

/// `min { q : w_q(state) <= 2^q }`, a lower bound on the value of the state
/// in both the bounded and the unrestricted game.
pub fn state_weight_bound(state: &GameState) -> Result<u32> {
    if state.total() == 0 {
        return Err(Error::Domain(
            "weight bound of a state with no live candidates".into(),
        ));
    }
    Ok(fast_weight_bound(state.counts()))
}

/// Reference scan of [`state_weight_bound`] with arbitrary-precision weights.
pub fn state_weight_bound_exact(state: &GameState) -> Result<u32> {
    if state.total() == 0 {
        return Err(Error::Domain(
            "weight bound of a state with no live candidates".into(),
        ));
    }
    Ok((0..)
        .find(|&q| state_weight(state, q) <= pow2(q))
        .expect("2^q eventually dominates"))
}

const FAST_Q_MAX: u32 = 126;

/// `C(q, <= j)` for `q <= FAST_Q_MAX`; every entry fits in a u128.
fn binom_le_table() -> &'static Vec<Vec<u128>> {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rows = FAST_Q_MAX as usize + 1;
        let mut binom = vec![vec![0u128; rows]; rows];
        for q in 0..rows {
            binom[q][0] = 1;
            for j in 1..=q {
                binom[q][j] = binom[q - 1][j - 1] + if j < q { binom[q - 1][j] } else { 0 };
            }
        }
        binom
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0u128, |acc, &c| {
                        *acc += c;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect()
    })
}

/// `w_q(counts)` in u128, `None` on overflow or out-of-table `q`.
pub(crate) fn fast_weight(counts: &[u32], q: u32) -> Option<u128> {
    if q > FAST_Q_MAX {
        return None;
    }
    let row = &binom_le_table()[q as usize];
    let lies = counts.len() - 1;
    let mut w = 0u128;
    for (i, &x) in counts.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let coeff = row[(lies - i).min(q as usize)];
        w = w.checked_add(coeff.checked_mul(u128::from(x))?)?;
    }
    Some(w)
}

/// State weight bound by binary search over the monotone predicate
/// `w_q <= 2^q` (valid because `w_{q+1} <= 2 w_q`). Falls back to the
/// big-integer scan when u128 is not wide enough.
pub(crate) fn fast_weight_bound(counts: &[u32]) -> u32 {
    if counts.iter().sum::<u32>() <= 1 {
        return 0;
    }
    let fits = |q: u32| fast_weight(counts, q).map(|w| w <= 1u128 << q);
    match fits(FAST_Q_MAX) {
        Some(true) => {
            let (mut lo, mut hi) = (0u32, FAST_Q_MAX);
            while lo < hi {
                let mid = (lo + hi) / 2;
                // below FAST_Q_MAX the weight cannot overflow once the top fits
                if fits(mid) == Some(true) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        }
        _ => {
            let state = GameState::new(counts.to_vec());
            (0..)
                .find(|&q| state_weight(&state, q) <= pow2(q))
                .expect("2^q eventually dominates")
        }
    }
}

/// `floor(n/k) - 1 + ceil(log2(k + m_1))` for `1 <= k <= n`.
pub fn ru0k_exact(n: u64, k: u64) -> Result<u32> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    Ok((n / k) as u32 - 1 + ceil_log2(k + n % k))
}

/// Lie-free bounded game value for any `n, k >= 1`; a cap of at least `n`
/// makes it plain binary search.
pub fn ru0_any_cap(n: u64, k: u64) -> Result<u32> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("need n, k >= 1, got n={n} k={k}")));
    }
    if k >= n {
        Ok(ceil_log2(n))
    } else {
        ru0k_exact(n, k)
    }
}

/// Value of the single-element-query game: `(l + 1) n - 1` for `n >= 2`.
/// A lone candidate needs no question at all.
pub fn ruk1_exact(n: u64, lies: usize) -> Result<u32> {
    match n {
        0 => Err(Error::Domain("n must be at least 1".into())),
        1 => Ok(0),
        _ => Ok(((lies as u64 + 1) * n - 1) as u32),
    }
}

/// `l * log2 l`, taken as 0 at `l = 1`.
fn l_log_l(lies: usize) -> f64 {
    if lies <= 1 {
        0.0
    } else {
        lies as f64 * (lies as f64).log2()
    }
}

/// Closed-form sandwich around the unrestricted value for `n >= 2`, `l >= 1`:
/// `log n + l loglog 2n - l log l` and `log n + l loglog 2n + 2 l log l + l + 2`.
pub fn ru_estimate(n: u64, lies: usize) -> Result<(f64, f64)> {
    if n < 2 || lies < 1 {
        return Err(Error::Domain(format!(
            "log estimate needs n >= 2 and l >= 1, got n={n} l={lies}"
        )));
    }
    let log_n = (n as f64).log2();
    let loglog = (2.0 * n as f64).log2().log2();
    let l = lies as f64;
    let lower = log_n + l * loglog - l_log_l(lies);
    let upper = log_n + l * loglog + 2.0 * l_log_l(lies) + l + 2.0;
    Ok((lower, upper))
}

/// `1 < k < floor(n/2)`.
pub fn check_restricted_domain(n: u64, k: u64) -> Result<()> {
    if k <= 1 || k >= n / 2 {
        return Err(Error::Domain(format!(
            "bounds need 1 < k < floor(n/2), got n={n} k={k}"
        )));
    }
    Ok(())
}

/// `floor((p+1) n / k) - 1`, the forced NO-run length for lie level `p`.
fn prefix_term(n: u64, k: u64, p: usize) -> u32 {
    ((p as u64 + 1) * n / k) as u32 - 1
}

/// Both variants of the main lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBounds {
    /// `max_p floor((p+1)n/k) - 1 + RU_{l-p}(k)`
    pub l: u32,
    /// same with `RU_{l-p}(k + m_{p+1})`
    pub l_plus: u32,
}

pub fn bound_l(n: u64, k: u64, lies: usize, ru_basic: &BasicEvaluator) -> Result<LowerBounds> {
    check_restricted_domain(n, k)?;
    let mut l = 0;
    let mut l_plus = 0;
    for p in 0..=lies {
        let rest = lies - p;
        let base = prefix_term(n, k, p);
        let plain = ru_basic(rest, &GameState::initial(k as u32, rest))?;
        let m = remainder_m(n, k, p as u64 + 1);
        let widened = ru_basic(rest, &GameState::initial((k + m) as u32, rest))?;
        l = l.max(base + plain);
        l_plus = l_plus.max(base + widened);
    }
    Ok(LowerBounds { l, l_plus })
}

/// Always computable variant with weight bounds in place of exact values.
pub fn bound_l_hat(n: u64, k: u64, lies: usize) -> Result<u32> {
    check_restricted_domain(n, k)?;
    Ok((0..=lies)
        .map(|p| prefix_term(n, k, p) + weight_bound(k, lies - p))
        .max()
        .expect("non-empty range"))
}

/// Two-component variant `max_p floor((p+1)n/k) - 1 + RU_{l-p}(k+m, n-k-m, 0, ...)`.
///
/// With no lies left only the first component is live, so the term becomes
/// `ceil(log2(k + m))`. An evaluator error (typically a budget overrun) is
/// returned as-is.
pub fn bound_l_tilde(n: u64, k: u64, lies: usize, ru_basic: &BasicEvaluator) -> Result<u32> {
    check_restricted_domain(n, k)?;
    let mut best = 0;
    for p in 0..=lies {
        let rest = lies - p;
        let head = k + remainder_m(n, k, p as u64 + 1);
        let tail_value = if rest == 0 {
            ceil_log2(head)
        } else {
            let mut counts = vec![0u32; rest + 1];
            counts[0] = head as u32;
            counts[1] = (n - head) as u32;
            ru_basic(rest, &GameState::new(counts))?
        };
        best = best.max(prefix_term(n, k, p) + tail_value);
    }
    Ok(best)
}

/// Large-`n` exact value formula and its applicability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2 {
    pub threshold: u64,
    pub applicable: bool,
    /// `floor((l+1)n/k) - 1 + ceil(log2(k + m_{l+1}))`, present iff applicable.
    pub value: Option<u32>,
}

/// The formula itself, without the applicability test.
pub fn large_n_formula(n: u64, k: u64, lies: usize) -> u32 {
    prefix_term(n, k, lies) + ceil_log2(k + remainder_m(n, k, lies as u64 + 1))
}

/// `max{k(l+5), k(loglog 2k + 6), k(loglog 2k + 2 log l + 5)}` with each real
/// part rounded up.
pub fn theorem2_threshold(k: u64, lies: usize) -> u64 {
    let kf = k as f64;
    let loglog = (2.0 * kf).log2().log2();
    let log_l = (lies as f64).log2();
    let t1 = k * (lies as u64 + 5);
    let t2 = (kf * (loglog + 6.0)).ceil() as u64;
    let t3 = (kf * (loglog + 2.0 * log_l + 5.0)).ceil() as u64;
    t1.max(t2).max(t3)
}

pub fn theorem2(n: u64, k: u64, lies: usize) -> Result<Theorem2> {
    check_restricted_domain(n, k)?;
    if lies < 1 {
        return Err(Error::Domain("large-n formula needs l >= 1".into()));
    }
    let threshold = theorem2_threshold(k, lies);
    let applicable = n >= threshold;
    Ok(Theorem2 {
        threshold,
        applicable,
        value: applicable.then(|| large_n_formula(n, k, lies)),
    })
}

/// `min { q : (q+1) a + b <= 2^q }`.
pub fn ch(a: u64, b: u64) -> u32 {
    (0..)
        .find(|&q: &u32| BigUint::from(q + 1) * a + b <= pow2(q))
        .expect("2^q eventually dominates")
}

/// Quantities of the one-lie optimal-query conjecture at state `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureQuantities {
    pub ch: u32,
    pub c: u32,
    /// `None` when no admissible `x` satisfies the defining predicate.
    pub chi0: Option<u32>,
    pub chi1: Option<u32>,
}

/// `ru1k` evaluates the one-lie bounded game (cap `k`) on two-component states.
pub fn conjecture_quantities(
    a: u32,
    b: u32,
    k: u32,
    ru1k: &dyn Fn(&GameState) -> Result<u32>,
) -> Result<ConjectureQuantities> {
    if 2 * k <= a || a + b < 2 {
        return Err(Error::Domain(format!(
            "conjecture needs 2k > a and a + b >= 2, got a={a} b={b} k={k}"
        )));
    }
    let ch = ch(a.into(), b.into());
    let c = ch.max(ru0_any_cap(2 * u64::from(a) + u64::from(b), k.into())?);
    let target = c.saturating_sub(1);
    let mut chi0 = None;
    for x in (0..=a.min(k)).rev() {
        if ru1k(&GameState::new(vec![x, a - x]))? <= target {
            chi0 = Some(x);
            break;
        }
    }
    let mut chi1 = None;
    if let Some(x) = chi0 {
        for y in (0..=b.min(k - x)).rev() {
            if ru1k(&GameState::new(vec![x, y + a - x]))? <= target {
                chi1 = Some(y);
                break;
            }
        }
    }
    Ok(ConjectureQuantities { ch, c, chi0, chi1 })
}

/// Every computable bound for one `(n, k, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub k: u64,
    pub lies: usize,
    pub l: u32,
    pub l_plus: u32,
    pub l_hat: u32,
    pub l_tilde: Option<u32>,
    pub theorem2_applicable: bool,
    pub theorem2_value: Option<u32>,
    pub exact: Option<u32>,
}

impl BoundReport {
    /// Computes everything except `exact`. `L~` is left empty when its
    /// evaluator runs over budget; other evaluator errors propagate.
    pub fn compute(n: u64, k: u64, lies: usize, ru_basic: &BasicEvaluator) -> Result<Self> {
        let lower = bound_l(n, k, lies, ru_basic)?;
        let l_hat = bound_l_hat(n, k, lies)?;
        let l_tilde = match bound_l_tilde(n, k, lies, ru_basic) {
            Ok(v) => Some(v),
            Err(Error::Budget(_)) => None,
            Err(e) => return Err(e),
        };
        let (theorem2_applicable, theorem2_value) = if lies >= 1 {
            let t = theorem2(n, k, lies)?;
            (t.applicable, t.value)
        } else {
            (false, None)
        };
        Ok(BoundReport {
            n,
            k,
            lies,
            l: lower.l,
            l_plus: lower.l_plus,
            l_hat,
            l_tilde,
            theorem2_applicable,
            theorem2_value,
            exact: None,
        })
    }

    /// Checks every sandwich and the large-`n` equality against `exact`;
    /// returns a description of each violated relation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(exact) = self.exact else {
            return out;
        };
        let lies = self.lies as u32;
        let mut check = |ok: bool, what: String| {
            if !ok {
                out.push(what);
            }
        };
        check(
            self.l <= exact && exact <= self.l + lies + 1,
            format!("L={} exact={exact} L+l+1={}", self.l, self.l + lies + 1),
        );
        check(
            self.l_hat <= exact && exact <= self.l_hat + 2 * lies + 1,
            format!(
                "L^={} exact={exact} L^+2l+1={}",
                self.l_hat,
                self.l_hat + 2 * lies + 1
            ),
        );
        if let Some(lt) = self.l_tilde {
            check(
                lt <= exact && exact <= lt + lies,
                format!("L~={lt} exact={exact} L~+l={}", lt + lies),
            );
        }
        if let Some(v) = self.theorem2_value {
            check(v == exact, format!("large-n formula {v} != exact {exact}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(c: &[u32]) -> GameState {
        GameState::new(c.to_vec())
    }

    #[test]
    fn remainders() {
        assert_eq!(remainder_m(10, 3, 1), 1);
        assert_eq!(remainder_m(56, 16, 2), 0);
        assert_eq!(remainder_m(7, 7, 3), 0);
    }

    #[test]
    fn binomial_prefix_sums() {
        assert_eq!(binom_le(5, 0), BigUint::from(1u32));
        assert_eq!(binom_le(5, 1), BigUint::from(6u32));
        assert_eq!(binom_le(10, 2), BigUint::from(56u32));
        // q < l saturates at 2^q
        assert_eq!(binom_le(3, 7), BigUint::from(8u32));
    }

    #[test]
    fn weights() {
        assert_eq!(state_weight(&st(&[1, 0]), 3), BigUint::from(4u32));
        assert_eq!(state_weight(&st(&[0, 0, 1]), 9), BigUint::from(1u32));
        assert_eq!(state_weight(&st(&[2, 2]), 4), BigUint::from(12u32));
    }

    #[test]
    fn weight_bounds() {
        assert_eq!(weight_bound(8, 0), 3);
        assert_eq!(weight_bound(4, 1), 5);
        assert_eq!(weight_bound(2, 2), 5);
        assert_eq!(state_weight_bound(&st(&[1, 0])).unwrap(), 0);
        assert_eq!(state_weight_bound(&st(&[0, 2])).unwrap(), 1);
        assert_eq!(state_weight_bound(&st(&[2, 2])).unwrap(), 4);
        assert!(state_weight_bound(&st(&[0, 0])).is_err());
    }

    #[test]
    fn fast_weight_bound_falls_back_on_overflow() {
        let big = st(&[600_000_000, 0, 0, 0, 0, 100_000_000]);
        assert_eq!(
            state_weight_bound(&big).unwrap(),
            state_weight_bound_exact(&big).unwrap()
        );
    }

    #[test]
    fn ceil_log2_is_exact_at_powers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(ceil_log2(1 << 40), 40);
    }

    #[test]
    fn lie_free_formula() {
        assert_eq!(ru0k_exact(10, 3).unwrap(), 4);
        assert_eq!(ru0k_exact(64, 16).unwrap(), 7);
        assert_eq!(ru0k_exact(8, 8).unwrap(), 3);
        assert!(ru0k_exact(3, 4).is_err());
        assert_eq!(ru0_any_cap(5, 9).unwrap(), 3);
    }

    #[test]
    fn single_element_formula() {
        assert_eq!(ruk1_exact(5, 0).unwrap(), 4);
        assert_eq!(ruk1_exact(3, 1).unwrap(), 5);
        assert_eq!(ruk1_exact(2, 2).unwrap(), 5);
        assert_eq!(ruk1_exact(1, 2).unwrap(), 0);
    }

    #[test]
    fn log_estimate() {
        let (lo, hi) = ru_estimate(2, 1).unwrap();
        assert!((lo - 2.0).abs() < 1e-12);
        assert!((hi - 5.0).abs() < 1e-12);
        let (lo, _) = ru_estimate(8, 2).unwrap();
        assert!((lo - 5.0).abs() < 1e-12);
        assert!(ru_estimate(1, 1).is_err());
        assert!(ru_estimate(4, 0).is_err());
    }

    #[test]
    fn large_n_thresholds() {
        assert_eq!(theorem2_threshold(2, 1), 14);
        let t = theorem2(14, 2, 1).unwrap();
        assert!(t.applicable);
        assert_eq!(t.value, Some(14));
        assert!(!theorem2(13, 2, 1).unwrap().applicable);
        let t = theorem2(56, 16, 1).unwrap();
        assert!(!t.applicable);
        assert_eq!(t.value, None);
        assert!(theorem2(56, 16, 0).is_err());
        assert!(theorem2(6, 3, 1).is_err());
    }

    #[test]
    fn hat_bound_examples() {
        // l = 0: floor(n/k) - 1 + ceil(log2 k)
        assert_eq!(bound_l_hat(20, 3, 0).unwrap(), 6 - 1 + 2);
        // n=14, k=2, l=1: max{6 + W_1(2), 13 + W_0(2)}
        let expected = (6 + weight_bound(2, 1)).max(13 + weight_bound(2, 0));
        assert_eq!(bound_l_hat(14, 2, 1).unwrap(), expected);
        assert!(bound_l_hat(8, 4, 1).is_err());
    }

    #[test]
    fn l_bounds_with_stub_evaluator() {
        // lie-free evaluator is binary search; RU_1(2) = 3 by hand
        let eval = |lies: usize, s: &GameState| -> Result<u32> {
            match (lies, s.counts()) {
                (0, [x]) => Ok(ceil_log2(u64::from(*x))),
                (1, [2, 0]) => Ok(3),
                _ => Err(Error::Budget("stub".into())),
            }
        };
        let lb = bound_l(14, 2, 1, &eval).unwrap();
        assert_eq!(lb.l, 14);
        assert_eq!(lb.l_plus, 14);
        assert_eq!(bound_l(20, 3, 0, &eval).unwrap().l, 6 - 1 + 2);
        // p=0 two-component term is out of the stub's reach
        assert!(matches!(
            bound_l_tilde(14, 2, 1, &eval),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn tilde_bound_lie_free() {
        let never = |_: usize, _: &GameState| -> Result<u32> { unreachable!() };
        // l = 0 resolves to floor(n/k) - 1 + ceil(log2(k + m_1))
        assert_eq!(
            bound_l_tilde(23, 4, 0, &never).unwrap(),
            ru0k_exact(23, 4).unwrap()
        );
    }

    #[test]
    fn ch_examples() {
        assert_eq!(ch(10, 44), 7);
        assert_eq!(ch(0, 2), 1);
    }

    #[test]
    fn report_violations() {
        let mut r = BoundReport {
            n: 14,
            k: 2,
            lies: 1,
            l: 14,
            l_plus: 14,
            l_hat: 13,
            l_tilde: Some(14),
            theorem2_applicable: true,
            theorem2_value: Some(14),
            exact: Some(14),
        };
        assert!(r.violations().is_empty());
        r.exact = Some(17);
        assert_eq!(r.violations().len(), 4);
        r.exact = None;
        assert!(r.violations().is_empty());
    }

    #[test]
    fn report_serializes_flat_with_nulls() {
        let r = BoundReport {
            n: 56,
            k: 16,
            lies: 1,
            l: 1,
            l_plus: 2,
            l_hat: 0,
            l_tilde: None,
            theorem2_applicable: false,
            theorem2_value: None,
            exact: None,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"n":56,"k":16,"lies":1,"l":1,"l_plus":2,"l_hat":0,"l_tilde":null,"theorem2_applicable":false,"theorem2_value":null,"exact":null}"#
        );
    }
}
