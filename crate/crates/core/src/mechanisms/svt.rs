//! The sparse vector technique over a fixed workload of binary queries, and
//! its F1 utility oracle.

use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::privacy::svt_noise_split;
use crate::rng::RngStream;

/// True answers of `m` sensitivity-1 binary queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryWorkload {
    truth: Vec<bool>,
}

impl QueryWorkload {
    pub fn new(truth: Vec<bool>) -> Self {
        Self { truth }
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.truth.iter().filter(|&&t| t).count()
    }

    pub fn truth(&self) -> &[bool] {
        &self.truth
    }
}

/// `m` queries of which exactly `positives`, placed uniformly at random, answer 1.
pub fn make_svt_workload(m: usize, positives: usize, rng: &RngStream) -> Result<QueryWorkload> {
    if positives > m {
        return Err(Error::input(format!("{positives} positives exceed {m} queries")));
    }
    let mut truth = vec![false; m];
    for i in rand::seq::index::sample(&mut rng.rng(), m, positives) {
        truth[i] = true;
    }
    Ok(QueryWorkload { truth })
}

/// One draw from a centred Laplace distribution with scale `b`.
pub fn laplace<R: Rng + ?Sized>(rng: &mut R, b: f64) -> f64 {
    let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
    -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Runs the sparse vector technique, visiting queries in `order` and
/// reporting marks at their original indices. Halts after `c` marks.
pub fn run_svt<R: Rng + ?Sized>(
    workload: &QueryWorkload,
    b: f64,
    c: u32,
    order: &[usize],
    rng: &mut R,
) -> Result<Vec<bool>> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::domain(format!("SVT noise b must be positive, got {b}")));
    }
    if c == 0 {
        return Err(Error::domain("SVT bound C must be >= 1"));
    }
    if order.len() != workload.len() || order.iter().any(|&i| i >= workload.len()) {
        return Err(Error::input("query order must be a permutation of the workload"));
    }
    let (b1, b2) = svt_noise_split(b, c as f64);
    let rho = laplace(rng, b1);
    let mut marks = vec![false; workload.len()];
    let mut count = 0;
    for &i in order {
        let nu = laplace(rng, b2);
        let q = if workload.truth[i] { 1.0 } else { 0.0 };
        if q + nu >= 0.5 + rho {
            marks[i] = true;
            count += 1;
            if count >= c {
                break;
            }
        }
    }
    Ok(marks)
}

/// F1 score of `pred` against `truth`; 0 when there are no true positives.
pub fn f1_score(truth: &[bool], pred: &[bool]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::input(format!(
            "truth has {} entries but prediction has {}",
            truth.len(),
            pred.len()
        )));
    }
    let tp = truth.iter().zip(pred).filter(|(t, p)| **t && **p).count();
    if tp == 0 {
        return Ok(0.0);
    }
    let predicted = pred.iter().filter(|&&p| p).count();
    let actual = truth.iter().filter(|&&t| t).count();
    Ok(2.0 * tp as f64 / (predicted + actual) as f64)
}

/// Mean F1 over `repetitions` runs, each with a fresh random query order and
/// fresh noise from its own child stream.
pub fn svt_utility_oracle(
    workload: &QueryWorkload,
    b: f64,
    c: u32,
    repetitions: usize,
    rng: &RngStream,
) -> Result<(f64, Vec<f64>)> {
    if repetitions == 0 {
        return Err(Error::input("at least one repetition is required"));
    }
    let runs = (0..repetitions)
        .map(|r| {
            let mut g = rng.child(r as u64).rng();
            let mut order: Vec<usize> = (0..workload.len()).collect();
            order.shuffle(&mut g);
            let marks = run_svt(workload, b, c, &order, &mut g)?;
            f1_score(workload.truth(), &marks)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = runs.iter().sum::<f64>() / runs.len() as f64;
    Ok((mean, runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn workload_examples() {
        let w = make_svt_workload(100, 10, &RngStream::new(5, 0)).unwrap();
        assert_eq!(w.positives(), 10);
        assert_eq!(w, make_svt_workload(100, 10, &RngStream::new(5, 0)).unwrap());
        assert_eq!(make_svt_workload(5, 0, &RngStream::new(1, 0)).unwrap().positives(), 0);
        assert!(make_svt_workload(3, 4, &RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn f1_examples() {
        let truth: Vec<bool> = (0..20).map(|i| i < 10).collect();
        assert_eq!(f1_score(&truth, &truth).unwrap(), 1.0);
        assert_eq!(f1_score(&truth, &[false; 20]).unwrap(), 0.0);
        let half: Vec<bool> = (0..20).map(|i| (5..15).contains(&i)).collect();
        assert!((f1_score(&truth, &half).unwrap() - 0.5).abs() < 1e-15);
        assert!(f1_score(&truth, &[true]).is_err());
    }

    #[test]
    fn noiseless_limit_marks_first_true_queries() {
        let w = make_svt_workload(50, 10, &RngStream::new(2, 0)).unwrap();
        let mut g = RngStream::new(3, 0).rng();
        let mut order: Vec<usize> = (0..50).collect();
        order.shuffle(&mut g);
        for c in [1, 4, 10, 25] {
            let marks = run_svt(&w, 1e-6, c, &order, &mut g).unwrap();
            let expected: Vec<usize> = order
                .iter()
                .copied()
                .filter(|&i| w.truth()[i])
                .take(c as usize)
                .collect();
            let mut got: Vec<usize> = (0..50).filter(|&i| marks[i]).collect();
            let mut exp_sorted = expected.clone();
            exp_sorted.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, exp_sorted);
        }
    }

    #[test]
    fn noiseless_oracle_values() {
        let w = make_svt_workload(100, 10, &RngStream::new(9, 0)).unwrap();
        let (mean, runs) = svt_utility_oracle(&w, 1e-6, 10, 5, &RngStream::new(1, 1)).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(runs.len(), 5);
        let (mean, _) = svt_utility_oracle(&w, 1e-6, 5, 5, &RngStream::new(1, 1)).unwrap();
        assert!((mean - 2.0 / 3.0).abs() < 1e-12);
        let once = svt_utility_oracle(&w, 3.0, 5, 1, &RngStream::new(4, 4)).unwrap();
        assert_eq!(once, svt_utility_oracle(&w, 3.0, 5, 1, &RngStream::new(4, 4)).unwrap());
    }

    #[test]
    fn rejects_zero_bound() {
        let w = make_svt_workload(4, 1, &RngStream::new(0, 0)).unwrap();
        let mut g = RngStream::new(0, 1).rng();
        assert!(matches!(run_svt(&w, 1.0, 0, &[0, 1, 2, 3], &mut g), Err(Error::Domain(_))));
    }

    #[test]
    fn laplace_moments() {
        let mut g = RngStream::new(11, 0).rng();
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| laplace(&mut g, 2.0)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // Var = 2b² = 8; the sample variance has relative sd about 1.1%.
        assert!(mean.abs() < 0.03);
        assert!((var - 8.0).abs() < 0.4);
    }

    proptest! {
        #[test]
        fn never_exceeds_bound(seed in 0u64..1000, c in 1u32..12, b in 1e-3f64..50.0) {
            let w = make_svt_workload(60, 15, &RngStream::new(seed, 0)).unwrap();
            let mut g = RngStream::new(seed, 1).rng();
            let order: Vec<usize> = (0..60).collect();
            let marks = run_svt(&w, b, c, &order, &mut g).unwrap();
            prop_assert!(marks.iter().filter(|&&m| m).count() <= c as usize);
        }

        #[test]
        fn f1_drops_when_a_true_positive_is_removed(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40)) {
            let truth: Vec<bool> = bits.iter().map(|b| b.0).collect();
            let pred: Vec<bool> = bits.iter().map(|b| b.1).collect();
            let f = f1_score(&truth, &pred).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            if let Some(i) = (0..truth.len()).find(|&i| truth[i] && pred[i]) {
                let mut fewer = pred.clone();
                fewer[i] = false;
                prop_assert!(f1_score(&truth, &fewer).unwrap() <= f);
            }
        }
    }
}
