//! Reshapes a sweep into the four plot-ready trend tables:
//! (a) `C_b`, `C_e` vs β per α, (b) `C_s` vs β per α,
//! (c) `C_b`, `C_e` vs α per `K_b`, (d) `C_s` vs α per `K_b`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::output::{fmt_sig, SweepRow};

pub const TREND_FILES: [&str; 4] = [
    "trend_a_capacity_vs_beta.csv",
    "trend_b_secrecy_vs_beta.csv",
    "trend_c_capacity_vs_alpha.csv",
    "trend_d_secrecy_vs_alpha.csv",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTables {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

impl TrendTables {
    pub fn files(&self) -> [(&'static str, &str); 4] {
        [(TREND_FILES[0], &self.a), (TREND_FILES[1], &self.b), (TREND_FILES[2], &self.c), (TREND_FILES[3], &self.d)]
    }
}

fn matches_alpha(a: f64, selected: &Option<Vec<f64>>) -> bool {
    selected.as_ref().is_none_or(|s| s.iter().any(|x| (x - a).abs() < 1e-9))
}

/// Builds the four tables. `alphas`/`kbobs` restrict the slices; `None`
/// keeps every value present in the sweep.
pub fn build_trends(rows: &[SweepRow], alphas: &Option<Vec<f64>>, kbobs: &Option<Vec<usize>>) -> TrendTables {
    let mut by_beta: Vec<&SweepRow> = rows.iter().filter(|r| matches_alpha(r.alpha, alphas)).collect();
    by_beta.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.k_bob.cmp(&y.k_bob)));
    let mut by_alpha: Vec<&SweepRow> =
        rows.iter().filter(|r| kbobs.as_ref().is_none_or(|k| k.contains(&r.k_bob))).collect();
    by_alpha.sort_by(|x, y| x.k_bob.cmp(&y.k_bob).then(x.alpha.total_cmp(&y.alpha)));

    let mut a = String::from("# (a) capacity vs beta; one block per alpha, rows ordered by k_bob\n");
    a.push_str("alpha,k_bob,beta,c_bob,c_eve,c_bob_random,c_eve_random\n");
    let mut b = String::from("# (b) secrecy capacity vs beta; one block per alpha, rows ordered by k_bob\n");
    b.push_str("alpha,k_bob,beta,c_secrecy,c_secrecy_random\n");
    for r in &by_beta {
        let _ = writeln!(
            a,
            "{},{},{},{},{},{},{}",
            fmt_sig(r.alpha),
            r.k_bob,
            fmt_sig(r.beta),
            fmt_sig(r.c_bob),
            fmt_sig(r.c_eve),
            fmt_sig(r.c_bob_random),
            fmt_sig(r.c_eve_random)
        );
        let _ = writeln!(b, "{},{},{},{},{}", fmt_sig(r.alpha), r.k_bob, fmt_sig(r.beta), fmt_sig(r.c_secrecy), fmt_sig(r.c_secrecy_random));
    }
    let mut c = String::from("# (c) capacity vs alpha; one block per k_bob, rows ordered by alpha\n");
    c.push_str("k_bob,beta,alpha,c_bob,c_eve,c_bob_random,c_eve_random\n");
    let mut d = String::from("# (d) secrecy capacity vs alpha; one block per k_bob, rows ordered by alpha\n");
    d.push_str("k_bob,beta,alpha,c_secrecy,c_secrecy_random\n");
    for r in &by_alpha {
        let _ = writeln!(
            c,
            "{},{},{},{},{},{},{}",
            r.k_bob,
            fmt_sig(r.beta),
            fmt_sig(r.alpha),
            fmt_sig(r.c_bob),
            fmt_sig(r.c_eve),
            fmt_sig(r.c_bob_random),
            fmt_sig(r.c_eve_random)
        );
        let _ = writeln!(d, "{},{},{},{},{}", r.k_bob, fmt_sig(r.beta), fmt_sig(r.alpha), fmt_sig(r.c_secrecy), fmt_sig(r.c_secrecy_random));
    }
    TrendTables { a, b, c, d }
}

/// Peak of `C_s` over α for one `K_b` slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPeak {
    pub k_bob: usize,
    pub alpha_at_max: f64,
    pub max_secrecy: f64,
    /// `C_s` at α = 1, when that cell is in the sweep.
    pub secrecy_at_one: Option<f64>,
}

impl AlphaPeak {
    pub fn is_interior(&self) -> bool {
        self.alpha_at_max > 0.0 && self.alpha_at_max < 1.0
    }
}

/// Per-`K_b` location of the secrecy peak along α (first α on ties).
pub fn alpha_peaks(rows: &[SweepRow]) -> Vec<AlphaPeak> {
    let ks: BTreeSet<usize> = rows.iter().map(|r| r.k_bob).collect();
    ks.into_iter()
        .map(|k| {
            let mut slice: Vec<&SweepRow> = rows.iter().filter(|r| r.k_bob == k).collect();
            slice.sort_by(|x, y| x.alpha.total_cmp(&y.alpha));
            let best = slice.iter().fold(slice[0], |best, r| if r.c_secrecy > best.c_secrecy { r } else { best });
            AlphaPeak {
                k_bob: k,
                alpha_at_max: best.alpha,
                max_secrecy: best.c_secrecy,
                secrecy_at_one: slice.iter().find(|r| r.alpha == 1.0).map(|r| r.c_secrecy),
            }
        })
        .collect()
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `None` when
/// either input is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
