//! Good/bad classification of Gram points, viscosity, block assembly and
//! repulsion scans.
//!
//! A Gram point is *good* when `(-1)^n Z(g_n) > 0`, i.e. when Z still has
//! the sign the alternation `Z(g_n) ~ (-1)^n` predicts. Z is evaluated with
//! the corrected main-sum approximation ([`crate::section::z_afe`]): the bare
//! main sum misclassifies a couple dozen low points, while the first
//! correction term pins every flag in the tested range.

use crate::error::{Error, Result};
use crate::gram::{gram_point, parity};
use crate::section::{z_afe, z_prime_afe};
use rayon::prelude::*;

/// Viscosity threshold separating ordinary bad points from corrupt ones.
pub const REPULSION_BOUND: f64 = 4.0;

/// `|Z|` below `this * t^(-1/4)` is flagged uncertain: the approximation
/// error budget is a fixed multiple of `t^(-3/4)`, so this keeps two orders
/// of headroom at desk heights.
pub const UNCERTAIN_FLOOR_SCALE: f64 = 10.0;

/// Classification of a single Gram point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramClassRecord {
    /// Gram index.
    pub n: i64,
    /// Gram point location.
    pub t: f64,
    /// `Z(g_n)` (corrected main-sum approximation).
    pub z: f64,
    /// `Z'(g_n)`.
    pub z_prime: f64,
    /// `(-1)^n Z(g_n) > 0`.
    pub good: bool,
    /// Viscosity `|Z'/Z|`; infinite if Z vanishes exactly.
    pub viscosity: f64,
    /// True when `|Z|` sits under the evaluation-noise floor.
    pub uncertain: bool,
}

/// A maximal run of bad Gram points together with its good endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GramBlock {
    /// First member (good).
    pub start_n: i64,
    /// Member count including both good endpoints; at least 3.
    pub length: u32,
}

impl GramBlock {
    /// Last member (good).
    pub fn end_n(&self) -> i64 {
        self.start_n + self.length as i64 - 1
    }

    /// All member indices.
    pub fn members(&self) -> std::ops::RangeInclusive<i64> {
        self.start_n..=self.end_n()
    }

    /// The bad interior indices.
    pub fn interior(&self) -> std::ops::Range<i64> {
        (self.start_n + 1)..self.end_n()
    }
}

/// One bad point in a repulsion scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepulsionRow {
    /// Gram index.
    pub n: i64,
    /// `|Z'/Z|` at the point.
    pub viscosity: f64,
    /// Both neighbours good.
    pub isolated: bool,
    /// `viscosity > REPULSION_BOUND`.
    pub satisfies_bound: bool,
    /// Bad with viscosity under the bound.
    pub corrupt: bool,
}

/// Full classification of a contiguous index range.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    /// First index scanned.
    pub lo: i64,
    /// Last index scanned.
    pub hi: i64,
    /// One row per index, in order.
    pub rows: Vec<ScanRow>,
    /// Bad points in range.
    pub bad_count: usize,
    /// Isolated bad points in range.
    pub isolated_count: usize,
    /// Isolated bad points with viscosity at or under the bound.
    pub violations: usize,
    /// Indices of corrupt points, ascending.
    pub corrupt: Vec<i64>,
}

/// A classification row with its neighbourhood flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    /// Point classification.
    pub class: GramClassRecord,
    /// Bad with both neighbours good.
    pub isolated: bool,
    /// Bad with viscosity under the repulsion bound.
    pub corrupt: bool,
}

/// Bad points only, with the repulsion verdict per point.
#[derive(Clone, Debug, PartialEq)]
pub struct RepulsionReport {
    /// First index scanned.
    pub lo: i64,
    /// Last index scanned.
    pub hi: i64,
    /// One row per bad point, ascending by index.
    pub rows: Vec<RepulsionRow>,
    /// Bad points in range.
    pub bad_count: usize,
    /// Isolated bad points in range.
    pub isolated_count: usize,
    /// Isolated bad points with viscosity at or under the bound.
    pub violations: usize,
    /// Indices of corrupt points, ascending.
    pub corrupt: Vec<i64>,
}

fn check_range(lo: i64, hi: i64) -> Result<()> {
    if lo > hi {
        return Err(Error::BadRange { lo, hi });
    }
    if lo < -1 {
        return Err(Error::GramIndex(lo));
    }
    Ok(())
}

/// Classifies the n-th Gram point.
pub fn classify(n: i64) -> Result<GramClassRecord> {
    let g = gram_point(n)?;
    let z = z_afe(g.t)?;
    let z_prime = z_prime_afe(g.t)?;
    let viscosity = if z == 0.0 {
        f64::INFINITY
    } else {
        (z_prime / z).abs()
    };
    Ok(GramClassRecord {
        n,
        t: g.t,
        z,
        z_prime,
        good: parity(n) * z > 0.0,
        viscosity,
        uncertain: z.abs() < UNCERTAIN_FLOOR_SCALE * g.t.powf(-0.25),
    })
}

/// Classifies `lo..=hi` in parallel; rows come back in index order and are
/// bit-identical regardless of thread count.
pub fn classify_range(lo: i64, hi: i64) -> Result<Vec<GramClassRecord>> {
    check_range(lo, hi)?;
    let ns: Vec<i64> = (lo..=hi).collect();
    ns.par_iter().map(|&n| classify(n)).collect()
}

/// True when `n` is bad and both neighbours are good.
pub fn is_isolated_bad(n: i64) -> Result<bool> {
    if n < 0 {
        return Err(Error::GramIndex(n));
    }
    Ok(!classify(n)?.good && classify(n - 1)?.good && classify(n + 1)?.good)
}

/// Classifies a range and attaches neighbourhood flags and summary counts.
pub fn scan(lo: i64, hi: i64) -> Result<ScanReport> {
    check_range(lo, hi)?;
    let ext_lo = (lo - 1).max(-1);
    let recs = classify_range(ext_lo, hi + 1)?;
    let idx = |n: i64| (n - ext_lo) as usize;
    let mut rows = Vec::with_capacity((hi - lo + 1) as usize);
    let mut bad_count = 0;
    let mut isolated_count = 0;
    let mut violations = 0;
    let mut corrupt = Vec::new();
    for n in lo..=hi {
        let class = recs[idx(n)];
        let bad = !class.good;
        let isolated =
            bad && n > ext_lo && recs[idx(n - 1)].good && recs[idx(n + 1)].good;
        let is_corrupt = bad && class.viscosity < REPULSION_BOUND;
        if bad {
            bad_count += 1;
        }
        if isolated {
            isolated_count += 1;
            if class.viscosity <= REPULSION_BOUND {
                violations += 1;
            }
        }
        if is_corrupt {
            corrupt.push(n);
        }
        rows.push(ScanRow {
            class,
            isolated,
            corrupt: is_corrupt,
        });
    }
    Ok(ScanReport {
        lo,
        hi,
        rows,
        bad_count,
        isolated_count,
        violations,
        corrupt,
    })
}

/// Scans a range and keeps only the bad points, each with its repulsion
/// verdict.
pub fn repulsion_scan(lo: i64, hi: i64) -> Result<RepulsionReport> {
    let report = scan(lo, hi)?;
    let rows = report
        .rows
        .iter()
        .filter(|r| !r.class.good)
        .map(|r| RepulsionRow {
            n: r.class.n,
            viscosity: r.class.viscosity,
            isolated: r.isolated,
            satisfies_bound: r.class.viscosity > REPULSION_BOUND,
            corrupt: r.corrupt,
        })
        .collect();
    Ok(RepulsionReport {
        lo: report.lo,
        hi: report.hi,
        rows,
        bad_count: report.bad_count,
        isolated_count: report.isolated_count,
        violations: report.violations,
        corrupt: report.corrupt,
    })
}

/// How far beyond a requested range endpoint [`blocks`] will look for a good
/// Gram point before giving up.
const ENDPOINT_SEARCH_LIMIT: i64 = 10_000;

/// Partitions the bad points of `lo..=hi` into maximal blocks, each wrapped
/// by its two good endpoints. Endpoints are searched outside the range when
/// the range itself starts or ends bad.
pub fn blocks(lo: i64, hi: i64) -> Result<Vec<GramBlock>> {
    check_range(lo, hi)?;
    let mut lo_good = lo;
    let mut searched = 0;
    while !classify(lo_good)?.good {
        if lo_good == -1 || searched >= ENDPOINT_SEARCH_LIMIT {
            return Err(Error::NoGoodEndpoint { n: lo, searched });
        }
        lo_good -= 1;
        searched += 1;
    }
    let mut hi_good = hi;
    searched = 0;
    while !classify(hi_good)?.good {
        if searched >= ENDPOINT_SEARCH_LIMIT {
            return Err(Error::NoGoodEndpoint { n: hi, searched });
        }
        hi_good += 1;
        searched += 1;
    }
    let recs = classify_range(lo_good, hi_good)?;
    let mut out = Vec::new();
    let mut run_start: Option<i64> = None;
    for r in &recs {
        if !r.good {
            run_start.get_or_insert(r.n);
        } else if let Some(start) = run_start.take() {
            // run_start..=r.n-1 is a maximal bad run; wrap it.
            out.push(GramBlock {
                start_n: start - 1,
                length: (r.n - start + 2) as u32,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_classifications() {
        let r = classify(0).unwrap();
        assert!(r.good);
        assert!(r.uncertain); // the noise floor is generous this low
        let r = classify(126).unwrap();
        assert!(!r.good);
        assert!((r.z - -0.028139123180890735).abs() < 1e-9);
        assert!(r.viscosity > REPULSION_BOUND);
        assert!(r.uncertain); // |Z| = 0.028 is tiny at this height
        let r = classify(134).unwrap();
        assert!(!r.good);
        assert!((r.z - -0.017213564947295257).abs() < 1e-9);
        let r = classify(-1).unwrap();
        assert!(r.good);
    }

    #[test]
    fn bad_set_up_to_150() {
        let bad: Vec<i64> = classify_range(0, 150)
            .unwrap()
            .iter()
            .filter(|r| !r.good)
            .map(|r| r.n)
            .collect();
        assert_eq!(bad, vec![126, 134]);
    }

    #[test]
    fn high_reference_point() {
        let r = classify(730119).unwrap();
        assert!(!r.good);
        assert!((r.viscosity - 4.457731541631921).abs() < 1e-4);
        assert!(!r.uncertain);
    }

    #[test]
    fn isolation_flags() {
        assert!(is_isolated_bad(126).unwrap());
        assert!(is_isolated_bad(134).unwrap());
        assert!(!is_isolated_bad(127).unwrap()); // good point
        assert!(matches!(is_isolated_bad(-1), Err(Error::GramIndex(-1))));
    }

    #[test]
    fn scan_summary_and_rows() {
        let rep = scan(120, 140).unwrap();
        assert_eq!(rep.rows.len(), 21);
        assert_eq!(rep.bad_count, 2);
        assert_eq!(rep.isolated_count, 2);
        assert_eq!(rep.violations, 0);
        assert!(rep.corrupt.is_empty());
        let r126 = &rep.rows[6];
        assert_eq!(r126.class.n, 126);
        assert!(r126.isolated && !r126.corrupt);
        // Edge of range still sees its outside neighbour.
        let rep = scan(126, 126).unwrap();
        assert!(rep.rows[0].isolated);
    }

    #[test]
    fn scans_concatenate_exactly() {
        let left = scan(0, 80).unwrap();
        let right = scan(81, 150).unwrap();
        let whole = scan(0, 150).unwrap();
        let glued: Vec<_> = left.rows.iter().chain(right.rows.iter()).collect();
        let direct: Vec<_> = whole.rows.iter().collect();
        assert_eq!(glued, direct);
        assert_eq!(left.bad_count + right.bad_count, whole.bad_count);
    }

    #[test]
    fn repulsion_keeps_only_bad_rows() {
        let rep = repulsion_scan(0, 150).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| r.isolated && r.satisfies_bound));
        assert_eq!(rep.bad_count, 2);
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn block_assembly() {
        assert_eq!(
            blocks(120, 140).unwrap(),
            vec![
                GramBlock {
                    start_n: 125,
                    length: 3
                },
                GramBlock {
                    start_n: 133,
                    length: 3
                }
            ]
        );
        assert!(blocks(0, 100).unwrap().is_empty());
        // A range starting and ending on the bad point extends both ways.
        let b = blocks(126, 126).unwrap();
        assert_eq!(b, vec![GramBlock { start_n: 125, length: 3 }]);
        assert_eq!(b[0].members().collect::<Vec<_>>(), vec![125, 126, 127]);
        assert_eq!(b[0].interior().collect::<Vec<_>>(), vec![126]);
    }

    #[test]
    fn range_validation() {
        assert!(matches!(
            classify_range(5, 4),
            Err(Error::BadRange { lo: 5, hi: 4 })
        ));
        assert!(matches!(scan(-3, 4), Err(Error::GramIndex(-3))));
    }
}
