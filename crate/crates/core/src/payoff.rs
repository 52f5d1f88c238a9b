//! The four strategies, their payoffs, and the best-response rule.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Strategy {
    Cooperator = 0,
    Defector = 1,
    Loner = 2,
    Punisher = 3,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::Cooperator, Strategy::Defector, Strategy::Loner, Strategy::Punisher];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Option<Strategy> {
        Strategy::ALL.get(i).copied()
    }

    pub fn letter(self) -> char {
        ['C', 'D', 'L', 'P'][self.index()]
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::Cooperator => "cooperator",
            Strategy::Defector => "defector",
            Strategy::Loner => "loner",
            Strategy::Punisher => "punisher",
        };
        f.write_str(name)
    }
}

/// Game constants. All values share one currency unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffParams {
    /// Benefit a cooperator confers on each non-loner neighbor.
    pub b: f64,
    /// Cost a cooperator pays per non-loner neighbor.
    pub c: f64,
    /// Fine a punisher imposes on a neighboring defector.
    pub beta: f64,
    /// Cost a punisher bears per neighboring defector.
    pub gamma: f64,
    /// Loner's fixed payoff per neighbor.
    pub sigma: f64,
}

impl PayoffParams {
    /// b=100, c=5, beta=150, gamma=50, sigma=b/8.
    pub const DEFAULT: PayoffParams =
        PayoffParams { b: 100.0, c: 5.0, beta: 150.0, gamma: 50.0, sigma: 12.5 };

    /// Alternate tabulated values with a lighter punishment: beta=50, gamma=15.
    pub const TABLE: PayoffParams = PayoffParams { b: 100.0, c: 5.0, beta: 50.0, gamma: 15.0, sigma: 12.5 };

    pub fn preset(name: &str) -> Option<PayoffParams> {
        match name {
            "default" | "text" => Some(Self::DEFAULT),
            "table" => Some(Self::TABLE),
            _ => None,
        }
    }

    /// Requires `0 < sigma < b` and `0 < c < gamma < beta`.
    pub fn validate(&self) -> Result<()> {
        let PayoffParams { b, c, beta, gamma, sigma } = *self;
        if !(0.0 < sigma && sigma < b) {
            return Err(Error::InvalidParams(format!("need 0 < sigma < b, got sigma={sigma}, b={b}")));
        }
        if !(0.0 < c && c < gamma && gamma < beta) {
            return Err(Error::InvalidParams(format!(
                "need 0 < c < gamma < beta, got c={c}, gamma={gamma}, beta={beta}"
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> PayoffParams {
        PayoffParams {
            b: self.b * k,
            c: self.c * k,
            beta: self.beta * k,
            gamma: self.gamma * k,
            sigma: self.sigma * k,
        }
    }
}

impl Default for PayoffParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// How many neighbors hold each strategy, indexed by [`Strategy::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct NeighborCounts(pub [u32; 4]);

impl NeighborCounts {
    pub fn new(n_c: u32, n_d: u32, n_l: u32, n_p: u32) -> Self {
        NeighborCounts([n_c, n_d, n_l, n_p])
    }

    #[inline]
    pub fn get(&self, s: Strategy) -> u32 {
        self.0[s.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Row and column payoffs for one pairwise encounter.
pub fn pairwise_payoff(row: Strategy, col: Strategy, params: &PayoffParams) -> (f64, f64) {
    use Strategy::*;
    let PayoffParams { b, c, beta, gamma, sigma } = *params;
    match (row, col) {
        (Cooperator, Cooperator) => (b - c, b - c),
        (Cooperator, Defector) | (Cooperator, Punisher) => (-c, b),
        (Cooperator, Loner) => (-c, sigma),
        (Defector, Cooperator) | (Punisher, Cooperator) => (b, -c),
        (Loner, Cooperator) => (sigma, -c),
        (Defector, Defector) | (Punisher, Punisher) => (0.0, 0.0),
        (Defector, Loner) | (Punisher, Loner) => (0.0, sigma),
        (Loner, Defector) | (Loner, Punisher) => (sigma, 0.0),
        (Defector, Punisher) => (-beta, -gamma),
        (Punisher, Defector) => (-gamma, -beta),
        (Loner, Loner) => (sigma, sigma),
    }
}

/// Payoff the focal agent would collect under each strategy, indexed by [`Strategy::index`].
///
/// A prospective cooperator pays no cost toward neighboring loners, so the
/// cooperator entry exceeds the sum of pairwise payoffs by `n_l * c`.
#[inline]
pub fn aggregate_payoffs(counts: NeighborCounts, params: &PayoffParams) -> [f64; 4] {
    let [n_c, n_d, n_l, n_p] = counts.0.map(f64::from);
    [
        n_c * params.b - (n_c + n_d + n_p) * params.c,
        n_c * params.b - n_p * params.beta,
        (n_c + n_d + n_l + n_p) * params.sigma,
        n_c * params.b - n_d * params.gamma,
    ]
}

/// A strategy attaining the maximum aggregate payoff.
///
/// Exact ties are broken uniformly at random; a unique maximum consumes no
/// randomness from `tie_stream`.
#[inline]
pub fn best_response<R: Rng + ?Sized>(
    counts: NeighborCounts,
    params: &PayoffParams,
    tie_stream: &mut R,
) -> Strategy {
    let payoffs = aggregate_payoffs(counts, params);
    let max = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut tied = [0usize; 4];
    let mut k = 0;
    for (i, &v) in payoffs.iter().enumerate() {
        if v == max {
            tied[k] = i;
            k += 1;
        }
    }
    let pick = if k == 1 { tied[0] } else { tied[tie_stream.random_range(0..k)] };
    Strategy::ALL[pick]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, StreamLabel};
    use proptest::prelude::{prop_assert_eq, proptest};

    const P: PayoffParams = PayoffParams::DEFAULT;

    #[test]
    fn presets_satisfy_ordering() {
        PayoffParams::DEFAULT.validate().unwrap();
        PayoffParams::TABLE.validate().unwrap();
        let bad = PayoffParams { gamma: 200.0, ..P };
        assert!(bad.validate().is_err());
        let bad = PayoffParams { sigma: 100.0, ..P };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pairwise_entries() {
        assert_eq!(pairwise_payoff(Strategy::Cooperator, Strategy::Defector, &P), (-5.0, 100.0));
        assert_eq!(pairwise_payoff(Strategy::Defector, Strategy::Punisher, &P), (-150.0, -50.0));
        assert_eq!(pairwise_payoff(Strategy::Loner, Strategy::Loner, &P), (12.5, 12.5));
    }

    #[test]
    fn pairwise_swap_symmetry() {
        for a in Strategy::ALL {
            for b in Strategy::ALL {
                let (x, y) = pairwise_payoff(a, b, &P);
                assert_eq!(pairwise_payoff(b, a, &P), (y, x), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_payoffs(NeighborCounts::new(3, 2, 1, 2), &P), [265.0, 0.0, 100.0, 200.0]);
        assert_eq!(aggregate_payoffs(NeighborCounts::default(), &P), [0.0; 4]);
        assert_eq!(aggregate_payoffs(NeighborCounts::new(0, 3, 0, 1), &P), [-20.0, -150.0, 50.0, -150.0]);
    }

    #[test]
    fn best_response_examples() {
        let mut rng = stream(0, StreamLabel::Tie);
        assert_eq!(best_response(NeighborCounts::new(3, 2, 1, 2), &P, &mut rng), Strategy::Cooperator);
        assert_eq!(best_response(NeighborCounts::new(0, 3, 0, 1), &P, &mut rng), Strategy::Loner);
    }

    #[test]
    fn four_way_tie_is_uniform() {
        let mut rng = stream(1, StreamLabel::Tie);
        let mut hits = [0usize; 4];
        let trials = 40_000;
        for _ in 0..trials {
            hits[best_response(NeighborCounts::default(), &P, &mut rng).index()] += 1;
        }
        // 5 sigma of a Binomial(40000, 1/4) is about 433.
        for h in hits {
            assert!((h as f64 - 10_000.0).abs() < 450.0, "{hits:?}");
        }
    }

    #[test]
    fn defector_punisher_tie_for_all_cooperator_neighborhood() {
        let counts = NeighborCounts::new(8, 0, 0, 0);
        assert_eq!(aggregate_payoffs(counts, &P), [760.0, 800.0, 100.0, 800.0]);
        let mut rng = stream(2, StreamLabel::Tie);
        let mut seen = [false; 4];
        for _ in 0..200 {
            seen[best_response(counts, &P, &mut rng).index()] = true;
        }
        assert_eq!(seen, [false, true, false, true]);
    }

    #[test]
    fn best_response_attains_max_exhaustively() {
        let mut rng = stream(3, StreamLabel::Tie);
        for params in [PayoffParams::DEFAULT, PayoffParams::TABLE] {
            for n_c in 0..=16u32 {
                for n_d in 0..=16 - n_c {
                    for n_l in 0..=16 - n_c - n_d {
                        for n_p in 0..=16 - n_c - n_d - n_l {
                            let counts = NeighborCounts::new(n_c, n_d, n_l, n_p);
                            let pay = aggregate_payoffs(counts, &params);
                            let max = pay.iter().copied().fold(f64::MIN, f64::max);
                            let s = best_response(counts, &params, &mut rng);
                            assert_eq!(pay[s.index()], max, "{counts:?}");
                        }
                    }
                }
            }
        }
    }

    fn argmax_set(p: [f64; 4]) -> Vec<usize> {
        let max = p.iter().copied().fold(f64::MIN, f64::max);
        (0..4).filter(|&i| p[i] == max).collect()
    }

    proptest! {
        #[test]
        fn loner_payoff_depends_on_degree_only(a in 0u32..20, b in 0u32..20, c in 0u32..20, d in 0u32..20) {
            let pay = aggregate_payoffs(NeighborCounts::new(a, b, c, d), &P);
            prop_assert_eq!(pay[2], f64::from(a + b + c + d) * P.sigma);
        }

        #[test]
        fn argmax_set_is_scale_invariant(a in 0u32..17, b in 0u32..17, c in 0u32..17, d in 0u32..17, k in 1u32..64) {
            // Power-of-two and small integer scales keep products exact.
            let counts = NeighborCounts::new(a, b, c, d);
            let base = argmax_set(aggregate_payoffs(counts, &P));
            let scaled = argmax_set(aggregate_payoffs(counts, &P.scaled(f64::from(k))));
            prop_assert_eq!(base, scaled);
        }
    }
}
