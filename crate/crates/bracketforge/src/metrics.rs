//! Derived statistics and format comparison reports over placement
//! distributions.

use std::fmt;

use crate::types::{PlacementDistribution, PROB_TOLERANCE};

#[derive(thiserror::Error, Clone, PartialEq, Eq, Debug)]
pub enum MetricsError {
    #[error(
        "distribution matrix is not square: {rows} row(s), row {bad_row} has {bad_len} entries"
    )]
    ShapeMismatch {
        rows: usize,
        bad_row: usize,
        bad_len: usize,
    },
    #[error("formats disagree on team count: {0} vs {1}")]
    MixedSizes(u32, u32),
    #[error("nothing to compare")]
    EmptyComparison,
}

/// First-order stochastic dominance between two seeds' placement rows.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Incomparable,
    Equal,
}

/// Pairwise stochastic-dominance relation over seeds: `i` dominates `j`
/// when `i`'s chance of finishing at-or-better than any place is at least
/// `j`'s, strictly greater somewhere. Comparisons use the shared probability
/// tolerance.
pub fn dominance_matrix(dist: &PlacementDistribution) -> Result<Vec<Vec<Dominance>>, MetricsError> {
    let d = &dist.d;
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(MetricsError::ShapeMismatch {
                rows: n,
                bad_row: i + 1,
                bad_len: row.len(),
            });
        }
    }
    let cdf: Vec<Vec<f64>> = d
        .iter()
        .map(|row| {
            row.iter()
                .scan(0.0, |acc, &p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let relation = |i: usize, j: usize| -> Dominance {
        let mut ge_everywhere = true;
        let mut le_everywhere = true;
        let mut strictly_greater = false;
        let mut strictly_less = false;
        for (a, b) in cdf[i].iter().zip(&cdf[j]) {
            let diff = a - b;
            if diff > PROB_TOLERANCE {
                strictly_greater = true;
                le_everywhere = false;
            } else if diff < -PROB_TOLERANCE {
                strictly_less = true;
                ge_everywhere = false;
            }
        }
        match (
            ge_everywhere,
            le_everywhere,
            strictly_greater,
            strictly_less,
        ) {
            (true, true, _, _) => Dominance::Equal,
            (true, _, true, _) => Dominance::Dominates,
            (_, true, _, true) => Dominance::DominatedBy,
            _ => Dominance::Incomparable,
        }
    };
    Ok((0..n)
        .map(|i| (0..n).map(|j| relation(i, j)).collect())
        .collect())
}

/// Expected matches played per seed plus the expected number of matches
/// held, which is half the per-seed total since every match involves two
/// teams.
#[derive(Clone, PartialEq, Debug)]
pub struct MatchLoad {
    pub per_seed: Vec<f64>,
    pub total: f64,
}

pub fn expected_matches(dist: &PlacementDistribution) -> MatchLoad {
    let per_seed = dist.expected_matches.clone();
    let total = per_seed.iter().sum::<f64>() / 2.0;
    MatchLoad { per_seed, total }
}

/// One format's column in a comparison report.
#[derive(Clone, PartialEq, Debug)]
pub struct ComparisonEntry {
    pub name: String,
    pub top_seed_win_probability: f64,
    /// Pairs `i < j` where the worse seed dominates the better one.
    pub dominance_violations: u32,
    pub expected_total_matches: f64,
    pub distribution: PlacementDistribution,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ComparisonReport {
    pub team_count: u32,
    /// Sorted by name for a deterministic layout.
    pub entries: Vec<ComparisonEntry>,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "teams: {}", self.team_count)?;
        writeln!(
            f,
            "{:<24} {:>12} {:>12} {:>12}",
            "format", "P(seed 1st)", "dom. viol.", "E[matches]"
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<24} {:>12.6} {:>12} {:>12.4}",
                e.name,
                e.top_seed_win_probability,
                e.dominance_violations,
                e.expected_total_matches
            )?;
        }
        Ok(())
    }
}

/// Side-by-side report over same-sized formats: probability the top seed
/// wins, dominance violation counts, and expected matches held.
pub fn compare_formats(
    results: &[(String, PlacementDistribution)],
) -> Result<ComparisonReport, MetricsError> {
    let first = results.first().ok_or(MetricsError::EmptyComparison)?;
    let team_count = first.1.team_count();
    for (_, dist) in results {
        if dist.team_count() != team_count {
            return Err(MetricsError::MixedSizes(team_count, dist.team_count()));
        }
    }
    let mut entries = Vec::with_capacity(results.len());
    for (name, dist) in results {
        let dom = dominance_matrix(dist)?;
        let mut violations = 0u32;
        for (j, row) in dom.iter().enumerate() {
            for &relation in row.iter().take(j) {
                if relation == Dominance::Dominates {
                    violations += 1;
                }
            }
        }
        entries.push(ComparisonEntry {
            name: name.clone(),
            top_seed_win_probability: dist.d[0][0],
            dominance_violations: violations,
            expected_total_matches: dist.total_matches,
            distribution: dist.clone(),
        });
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ComparisonReport {
        team_count,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(d: Vec<Vec<f64>>) -> PlacementDistribution {
        let n = d.len();
        PlacementDistribution {
            d,
            std_err: None,
            expected_matches: vec![0.0; n],
            total_matches: 0.0,
            reps: None,
        }
    }

    #[test]
    fn identical_rows_are_equal() {
        let uniform = dist(vec![vec![0.25; 4]; 4]);
        let dom = dominance_matrix(&uniform).unwrap();
        for row in &dom {
            for &r in row {
                assert_eq!(r, Dominance::Equal);
            }
        }
    }

    #[test]
    fn degenerate_ordered_rows_dominate_downward() {
        let n = 4;
        let ordered = dist(
            (0..n)
                .map(|i| (0..n).map(|p| if p == i { 1.0 } else { 0.0 }).collect())
                .collect(),
        );
        let dom = dominance_matrix(&ordered).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = match i.cmp(&j) {
                    std::cmp::Ordering::Less => Dominance::Dominates,
                    std::cmp::Ordering::Equal => Dominance::Equal,
                    std::cmp::Ordering::Greater => Dominance::DominatedBy,
                };
                assert_eq!(dom[i][j], expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn crossing_cdfs_are_incomparable() {
        // rows are doubly stochastic; the first and second CDFs cross
        let crossing = dist(vec![
            vec![0.5, 0.0, 0.5],
            vec![0.0, 1.0, 0.0],
            vec![0.5, 0.0, 0.5],
        ]);
        let dom = dominance_matrix(&crossing).unwrap();
        assert_eq!(dom[0][1], Dominance::Incomparable);
        assert_eq!(dom[1][0], Dominance::Incomparable);
        assert_eq!(dom[0][2], Dominance::Equal);
    }

    #[test]
    fn dominance_is_antisymmetric() {
        let d = dist(vec![
            vec![0.6, 0.3, 0.1],
            vec![0.3, 0.4, 0.3],
            vec![0.1, 0.3, 0.6],
        ]);
        let dom = dominance_matrix(&d).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mirrored = match dom[i][j] {
                    Dominance::Dominates => Dominance::DominatedBy,
                    Dominance::DominatedBy => Dominance::Dominates,
                    other => other,
                };
                assert_eq!(dom[j][i], mirrored);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let ragged = dist(vec![vec![0.5, 0.5], vec![1.0]]);
        assert!(matches!(
            dominance_matrix(&ragged),
            Err(MetricsError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn match_load_total_is_half_of_per_seed_sum() {
        let mut d = dist(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        d.expected_matches = vec![1.0, 1.0];
        let load = expected_matches(&d);
        assert_eq!(load.total, 1.0);
    }

    #[test]
    fn compare_requires_matching_sizes() {
        let a = dist(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let b = dist(vec![vec![1.0]]);
        let err = compare_formats(&[("a".to_string(), a), ("b".to_string(), b)]).unwrap_err();
        assert!(matches!(err, MetricsError::MixedSizes(2, 1)));
    }

    #[test]
    fn single_entry_report() {
        let a = dist(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let report = compare_formats(&[("only".to_string(), a)]).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].top_seed_win_probability, 0.5);
        assert_eq!(format!("{report}"), format!("{report}"));
    }
}
