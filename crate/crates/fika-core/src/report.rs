//! Run metrics and the consolidated report tables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coverage::CoverageMap;
use crate::model::{MethodId, ProjectModel};
use crate::scenario::{OutcomeStatus, ScenarioOutcome};

/// A covered-over-total pair rendered the way the tables print it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub count: usize,
    pub total: usize,
    /// Integer percent, rounded half-up.
    pub percent: u32,
    /// `count/total (percent%)`.
    pub label: String,
}

impl Fraction {
    pub fn new(count: usize, total: usize) -> Self {
        let percent = percent_half_up(count, total);
        Fraction {
            count,
            total,
            percent,
            label: format!("{count}/{total} ({percent}%)"),
        }
    }
}

/// Integer percent with half-up rounding; 0 when the denominator is 0.
pub fn percent_half_up(count: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    ((200 * count + total) / (2 * total)) as u32
}

/// Reached-scenario counts by shortest-path length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathLengthHistogram {
    #[serde(rename = "1")]
    pub one: usize,
    #[serde(rename = "2")]
    pub two: usize,
    #[serde(rename = "3")]
    pub three: usize,
    #[serde(rename = "4+")]
    pub four_plus: usize,
}

impl PathLengthHistogram {
    pub fn add(&mut self, length: usize) {
        match length {
            0 | 1 => self.one += 1,
            2 => self.two += 1,
            3 => self.three += 1,
            _ => self.four_plus += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.one + self.two + self.three + self.four_plus
    }
}

/// The per-project summary all report tables derive from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub unique_tpl_methods: usize,
    pub tpl_call_sites: usize,
    pub covered_by_tests: Fraction,
    /// Call sites the generation queue actually processed.
    pub attempted: usize,
    /// Reached sites over attempted sites.
    pub covered_by_scenarios: Fraction,
    /// Union of test-covered and scenario-reached sites over all sites.
    pub total_guarantees: Fraction,
    /// Percentage points added by scenarios on top of developer tests.
    pub additional_by_tool_pct: i64,
    /// Cumulative successes within k attempts, k = 1..=max_attempts.
    pub iteration_successes: Vec<usize>,
    pub path_length_histogram: PathLengthHistogram,
}

/// A call site for counting purposes: the (m_dp, m_tpl) pair.
pub type SiteKey = (MethodId, MethodId);

/// All distinct (m_dp, m_tpl) pairs in the model.
pub fn all_site_pairs(model: &ProjectModel) -> BTreeSet<SiteKey> {
    let mut pairs = BTreeSet::new();
    for site in model.tpl_call_sites() {
        for target in &site.tpl_targets {
            pairs.insert((site.site.caller.clone(), target.clone()));
        }
    }
    pairs
}

/// Pairs with at least one physical call line covered by the map.
pub fn pairs_covered_by(coverage: &CoverageMap, model: &ProjectModel) -> BTreeSet<SiteKey> {
    let mut covered = BTreeSet::new();
    for site in model.tpl_call_sites() {
        let Some(file) = model.file_of_method(&site.site.caller) else {
            continue;
        };
        if !coverage.is_covered(file, site.line) {
            continue;
        }
        for target in &site.tpl_targets {
            covered.insert((site.site.caller.clone(), target.clone()));
        }
    }
    covered
}

/// Recomputes the cumulative per-iteration success counters from outcomes.
pub fn iteration_successes(outcomes: &[ScenarioOutcome], max_attempts: u32) -> Vec<usize> {
    let mut counters = vec![0usize; max_attempts as usize];
    for outcome in outcomes {
        if outcome.status != OutcomeStatus::Reached {
            continue;
        }
        let k = outcome
            .attempts
            .last()
            .map(|a| a.attempt_index as usize)
            .unwrap_or(1);
        for slot in counters.iter_mut().skip(k.saturating_sub(1)) {
            *slot += 1;
        }
    }
    counters
}

/// Builds the metrics summary from the model, developer coverage and the
/// generation outcomes.
pub fn compute_metrics(
    model: &ProjectModel,
    dev_coverage: &CoverageMap,
    outcomes: &[ScenarioOutcome],
    max_attempts: u32,
) -> MetricsReport {
    compute_metrics_from_sets(
        &all_site_pairs(model),
        &pairs_covered_by(dev_coverage, model),
        outcomes,
        max_attempts,
    )
}

/// Same summary from pre-extracted site sets, so reports can be rebuilt from
/// artifacts alone.
pub fn compute_metrics_from_sets(
    pairs: &BTreeSet<SiteKey>,
    tests: &BTreeSet<SiteKey>,
    outcomes: &[ScenarioOutcome],
    max_attempts: u32,
) -> MetricsReport {
    let unique_tpl_methods = pairs
        .iter()
        .map(|(_, tpl)| tpl.clone())
        .collect::<BTreeSet<_>>()
        .len();

    let attempted: BTreeSet<SiteKey> = outcomes
        .iter()
        .map(|o| (o.site.m_dp.clone(), o.site.m_tpl.clone()))
        .collect();
    let reached: BTreeSet<SiteKey> = outcomes
        .iter()
        .filter(|o| o.status == OutcomeStatus::Reached)
        .map(|o| (o.site.m_dp.clone(), o.site.m_tpl.clone()))
        .collect();

    let union: BTreeSet<&SiteKey> = tests.union(&reached).collect();
    let covered_by_tests = Fraction::new(tests.len(), pairs.len());
    let total_guarantees = Fraction::new(union.len(), pairs.len());

    let mut histogram = PathLengthHistogram::default();
    for outcome in outcomes {
        if outcome.status == OutcomeStatus::Reached {
            histogram.add(outcome.path_length);
        }
    }

    MetricsReport {
        unique_tpl_methods,
        tpl_call_sites: pairs.len(),
        covered_by_tests: covered_by_tests.clone(),
        attempted: attempted.len(),
        covered_by_scenarios: Fraction::new(reached.len(), attempted.len()),
        total_guarantees: total_guarantees.clone(),
        additional_by_tool_pct: i64::from(total_guarantees.percent)
            - i64::from(covered_by_tests.percent),
        iteration_successes: iteration_successes(outcomes, max_attempts),
        path_length_histogram: histogram,
    }
}

/// One-row summary table in the project/coverage/guarantees column order.
pub fn metrics_csv(module: &str, metrics: &MetricsReport) -> String {
    let mut header = String::from(
        "module,unique_tpl_methods,tpl_call_sites,covered_by_tests,attempted,\
         covered_by_scenarios,total_guarantees,additional_by_tool",
    );
    for k in 1..=metrics.iteration_successes.len() {
        header.push_str(&format!(",I{k}"));
    }
    let mut row = format!(
        "{module},{},{},{},{},{},{},{}",
        metrics.unique_tpl_methods,
        metrics.tpl_call_sites,
        metrics.covered_by_tests.label,
        metrics.attempted,
        metrics.covered_by_scenarios.label,
        metrics.total_guarantees.label,
        metrics.additional_by_tool_pct,
    );
    for v in &metrics.iteration_successes {
        row.push_str(&format!(",{v}"));
    }
    format!("{header}\n{row}\n")
}

/// Path-length distribution table with the fixed 1/2/3/4+ buckets.
pub fn paths_csv(module: &str, histogram: &PathLengthHistogram) -> String {
    format!(
        "module,1,2,3,4+\n{module},{},{},{},{}\n",
        histogram.one, histogram.two, histogram.three, histogram.four_plus
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::parse_lcov;
    use crate::model::dsl::parse_fixture_dsl;
    use crate::scenario::SitePair;

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(percent_half_up(469, 668), 70);
        assert_eq!(percent_half_up(1, 2), 50);
        assert_eq!(percent_half_up(1, 3), 33);
        assert_eq!(percent_half_up(2, 3), 67);
        assert_eq!(percent_half_up(1, 8), 13); // 12.5 rounds up
        assert_eq!(percent_half_up(3, 8), 38); // 37.5 rounds up
        assert_eq!(percent_half_up(0, 0), 0);
        assert_eq!(percent_half_up(5, 5), 100);
    }

    #[test]
    fn fraction_labels_match_the_table_style() {
        assert_eq!(Fraction::new(469, 668).label, "469/668 (70%)");
        assert_eq!(Fraction::new(0, 0).label, "0/0 (0%)");
        assert_eq!(Fraction::new(3, 4).label, "3/4 (75%)");
    }

    #[test]
    fn histogram_buckets_cap_at_four_plus() {
        let mut h = PathLengthHistogram::default();
        for len in [1, 2, 2, 3, 4, 5, 9] {
            h.add(len);
        }
        assert_eq!((h.one, h.two, h.three, h.four_plus), (1, 2, 1, 3));
        assert_eq!(h.total(), 7);
    }

    const FOUR_SITES: &str = "\
project metrics-demo
dependency com.example:lib 1.0.0
class m.E1 file m.fika {
  public e1() {
    call lib.L.f1()
  }
}
class m.E2 file m.fika {
  public e2() {
    call lib.L.f2()
  }
}
class m.E3 file m.fika {
  public e3() {
    call lib.L.f3()
  }
}
class m.E4 file m.fika {
  public e4() {
    call lib.L.f4()
  }
}
dep class lib.L {
  public static f1()
  public static f2()
  public static f3()
  public static f4()
}
";

    fn reached(m_dp: &str, m_tpl: &str, length: usize, attempt: u32) -> ScenarioOutcome {
        ScenarioOutcome {
            site: SitePair {
                m_dp: MethodId(m_dp.to_string()),
                m_tpl: MethodId(m_tpl.to_string()),
            },
            entry: MethodId(m_dp.to_string()),
            path_length: length,
            status: OutcomeStatus::Reached,
            attempts: (1..=attempt)
                .map(|attempt_index| crate::scenario::AttemptRecord {
                    attempt_index,
                    static_validation: true,
                    compiled: attempt_index == attempt,
                    executed: attempt_index == attempt,
                    target_reached: attempt_index == attempt,
                    feedback: None,
                })
                .collect(),
            scenario_file: Some("x_attempt1".into()),
            lcov: Some(String::new()),
            error: None,
        }
    }

    #[test]
    fn union_semantics_drive_total_guarantees() {
        let model = parse_fixture_dsl(FOUR_SITES).unwrap();
        let sites = model.tpl_call_sites();
        assert_eq!(sites.len(), 4);
        // Tests cover sites 1 and 2; a scenario reaches site 3 (1 new).
        let lcov = format!(
            "SF:m.fika\nDA:{},1\nDA:{},1\nend_of_record\n",
            sites[0].line, sites[1].line
        );
        let dev = parse_lcov(&lcov).unwrap();
        let outcomes = vec![reached("m.E3#e3()", "lib.L#f3()", 1, 1)];

        let metrics = compute_metrics(&model, &dev, &outcomes, 5);
        assert_eq!(metrics.tpl_call_sites, 4);
        assert_eq!(metrics.unique_tpl_methods, 4);
        assert_eq!(metrics.covered_by_tests.label, "2/4 (50%)");
        assert_eq!(metrics.attempted, 1);
        assert_eq!(metrics.covered_by_scenarios.label, "1/1 (100%)");
        assert_eq!(metrics.total_guarantees.label, "3/4 (75%)");
        assert_eq!(metrics.additional_by_tool_pct, 25);
        assert_eq!(metrics.iteration_successes, vec![1, 1, 1, 1, 1]);
        assert_eq!(metrics.path_length_histogram.one, 1);
    }

    #[test]
    fn scenario_covering_an_already_tested_site_adds_nothing() {
        let model = parse_fixture_dsl(FOUR_SITES).unwrap();
        let sites = model.tpl_call_sites();
        let lcov = format!("SF:m.fika\nDA:{},1\nend_of_record\n", sites[0].line);
        let dev = parse_lcov(&lcov).unwrap();
        // The reached site is the same one tests already cover.
        let outcomes = vec![reached("m.E1#e1()", "lib.L#f1()", 1, 2)];
        let metrics = compute_metrics(&model, &dev, &outcomes, 5);
        assert_eq!(metrics.total_guarantees.count, 1);
        assert_eq!(metrics.iteration_successes, vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn csv_tables_have_the_fixed_column_order() {
        let model = parse_fixture_dsl(FOUR_SITES).unwrap();
        let metrics = compute_metrics(&model, &CoverageMap::default(), &[], 3);
        let csv = metrics_csv("metrics-demo", &metrics);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "module,unique_tpl_methods,tpl_call_sites,covered_by_tests,attempted,covered_by_scenarios,total_guarantees,additional_by_tool,I1,I2,I3"
        );
        assert!(lines.next().unwrap().starts_with("metrics-demo,4,4,0/4 (0%),0,0/0 (0%),0/4 (0%),0,"));

        let paths = paths_csv("metrics-demo", &metrics.path_length_histogram);
        assert_eq!(paths, "module,1,2,3,4+\nmetrics-demo,0,0,0,0\n");
    }

    #[test]
    fn metrics_survive_a_json_round_trip() {
        let model = parse_fixture_dsl(FOUR_SITES).unwrap();
        let outcomes = vec![reached("m.E2#e2()", "lib.L#f2()", 2, 1)];
        let metrics = compute_metrics(&model, &CoverageMap::default(), &outcomes, 5);
        let json = serde_json::to_string_pretty(&metrics).unwrap();
        assert!(json.contains("\"4+\""));
        let back: MetricsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, metrics);
    }
}
