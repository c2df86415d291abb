//! Monte-Carlo evaluation: sweep the error parameter, localize every node
//! with each clustering method, and aggregate the mean position error.
//!
//! Every node treats all of its neighbours as anchors. For each anchor link
//! an estimated distance is drawn from the error model; the circles are
//! clustered and the centroid is the estimate. An empty cluster triggers a
//! fresh draw, up to `max_retries` extra attempts. The draws for
//! `(e_index, node, attempt)` come from [`rng::substream`] and are shared by
//! all methods.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{form_cluster, Cluster, ClusterOptions, Method};
use crate::network::{AnchorLink, NetworkTopology};
use crate::ranging::{ErrorKind, ErrorModel, Sign};
use crate::{rng, Circle, Error, Point2, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub e_start: f64,
    pub e_step: f64,
    /// Number of increments; `steps + 1` error values are evaluated.
    pub steps: u32,
    pub error_model: ErrorKind,
    /// Range scale of the Constant model; the network radius when absent.
    pub max_range: Option<f64>,
    pub max_retries: u32,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub cluster: ClusterOptions,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            e_start: 0.0,
            e_step: 0.001,
            steps: 200,
            error_model: ErrorKind::Random,
            max_range: None,
            max_retries: 50,
            seed: 0,
            methods: Method::ALL.to_vec(),
            cluster: ClusterOptions::default(),
            parallel: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_start.is_finite() && self.e_start >= 0.0) {
            return Err(Error::invalid(format!("e_start={} must be >= 0", self.e_start)));
        }
        if !(self.e_step.is_finite() && self.e_step > 0.0) {
            return Err(Error::invalid(format!("e_step={} must be > 0", self.e_step)));
        }
        if self.steps < 1 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if self.e_value(self.steps) >= 1.0 {
            return Err(Error::invalid("sweep reaches e >= 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        if let Some(r) = self.max_range {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::invalid(format!("max_range={r} must be positive")));
            }
        }
        Ok(())
    }

    /// `e_start + index * e_step`.
    pub fn e_value(&self, index: u32) -> f64 {
        self.e_start + f64::from(index) * self.e_step
    }

    pub fn e_values(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        (0..=self.steps).map(|i| (i, self.e_value(i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeResult {
    pub node: usize,
    pub method: Method,
    /// Estimated position and its distance to the true one.
    pub outcome: Option<(Point2, f64)>,
    /// Attempts made; 0 when the node has fewer than 3 anchors.
    pub attempts: u32,
}

impl NodeResult {
    pub fn estimated(&self) -> Option<Point2> {
        self.outcome.map(|(p, _)| p)
    }

    pub fn error_distance(&self) -> Option<f64> {
        self.outcome.map(|(_, d)| d)
    }

    pub fn is_localized(&self) -> bool {
        self.outcome.is_some()
    }
}

/// Circles and cluster of the last attempt, for inspection.
#[derive(Debug, Clone)]
pub struct AttemptDetail {
    pub circles: Vec<Circle>,
    pub cluster: Option<Cluster>,
}

/// Circles drawn from the error model for each anchor link.
pub fn draw_circles<R: rand::Rng + ?Sized>(
    anchors: &[AnchorLink],
    model: &ErrorModel,
    rng: &mut R,
) -> Result<Vec<Circle>> {
    anchors
        .iter()
        .map(|a| {
            let est = model.apply(a.true_distance, rng, Sign::Plus)?;
            Circle::try_new(a.position, est)
        })
        .collect()
}

/// Localizes one node, retrying with fresh draws while the cluster is empty.
///
/// `rng_for_attempt(k)` supplies the random source of attempt `k` (0-based).
#[allow(clippy::too_many_arguments)]
pub fn localize_node<R, F>(
    node: usize,
    true_position: Point2,
    anchors: &[AnchorLink],
    model: &ErrorModel,
    method: Method,
    opts: &ClusterOptions,
    max_retries: u32,
    rng_for_attempt: F,
) -> Result<NodeResult>
where
    R: rand::Rng,
    F: FnMut(u32) -> R,
{
    localize_node_detailed(
        node,
        true_position,
        anchors,
        model,
        method,
        opts,
        max_retries,
        rng_for_attempt,
    )
    .map(|(result, _)| result)
}

#[allow(clippy::too_many_arguments)]
pub fn localize_node_detailed<R, F>(
    node: usize,
    true_position: Point2,
    anchors: &[AnchorLink],
    model: &ErrorModel,
    method: Method,
    opts: &ClusterOptions,
    max_retries: u32,
    mut rng_for_attempt: F,
) -> Result<(NodeResult, Option<AttemptDetail>)>
where
    R: rand::Rng,
    F: FnMut(u32) -> R,
{
    let mut result = NodeResult { node, method, outcome: None, attempts: 0 };
    if anchors.len() < 3 {
        return Ok((result, None));
    }
    let mut last = None;
    for attempt in 0..=max_retries {
        let mut rng = rng_for_attempt(attempt);
        let circles = draw_circles(anchors, model, &mut rng)?;
        let cluster = form_cluster(method, &circles, opts)?;
        result.attempts = attempt + 1;
        if !cluster.is_empty() {
            let estimate = crate::clustering::estimate_position(&cluster)?;
            result.outcome = Some((estimate, estimate.distance(true_position)));
            return Ok((result, Some(AttemptDetail { circles, cluster: Some(cluster) })));
        }
        last = Some(AttemptDetail { circles, cluster: Some(cluster) });
    }
    Ok((result, last))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub e: f64,
    pub e_index: u32,
    pub method: Method,
    /// Mean error over localized nodes; `None` when no node was localized.
    pub total_error: Option<f64>,
    /// `100 * total_error / radius`.
    pub total_error_pct_range: Option<f64>,
    pub localized_count: usize,
    pub node_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeDetail {
    pub e: f64,
    pub e_index: u32,
    pub result: NodeResult,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub nodes: Vec<NodeDetail>,
}

fn model_for(cfg: &SweepConfig, topology: &NetworkTopology, e: f64) -> Result<ErrorModel> {
    ErrorModel::new(cfg.error_model, e, cfg.max_range.unwrap_or(topology.radius()))
}

/// Localizes every node for one `(e, method)` cell.
pub fn evaluate_cell(
    topology: &NetworkTopology,
    cfg: &SweepConfig,
    e_index: u32,
    method: Method,
) -> Result<Vec<NodeResult>> {
    let model = model_for(cfg, topology, cfg.e_value(e_index))?;
    let one = |node: usize| {
        localize_node(
            node,
            topology.position(node),
            &topology.anchors_of(node),
            &model,
            method,
            &cfg.cluster,
            cfg.max_retries,
            |attempt| rng::substream(cfg.seed, e_index.into(), node as u64, attempt.into()),
        )
    };
    let n = topology.node_count();
    if cfg.parallel {
        (0..n).into_par_iter().map(one).collect()
    } else {
        (0..n).map(one).collect()
    }
}

/// Summarizes one cell; node errors are summed in node order.
pub fn aggregate(
    e: f64,
    e_index: u32,
    method: Method,
    radius: f64,
    results: &[NodeResult],
) -> SweepRecord {
    let errors: Vec<f64> = results.iter().filter_map(NodeResult::error_distance).collect();
    let total_error = (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64);
    SweepRecord {
        e,
        e_index,
        method,
        total_error,
        total_error_pct_range: total_error.map(|t| 100.0 * t / radius),
        localized_count: errors.len(),
        node_count: results.len(),
    }
}

pub fn run_sweep(topology: &NetworkTopology, cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_detailed(topology, cfg, false).map(|out| out.records)
}

/// Runs the full grid; `keep_nodes` retains every per-node result.
pub fn run_sweep_detailed(
    topology: &NetworkTopology,
    cfg: &SweepConfig,
    keep_nodes: bool,
) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();

    let mut out = SweepOutput::default();
    for (e_index, e) in cfg.e_values() {
        for &method in &methods {
            let results = evaluate_cell(topology, cfg, e_index, method)?;
            out.records.push(aggregate(e, e_index, method, topology.radius(), &results));
            if keep_nodes {
                out.nodes.extend(results.into_iter().map(|result| NodeDetail { e, e_index, result }));
            }
        }
    }
    Ok(out)
}

/// Nine significant digits, scientific notation.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

pub const RESULTS_HEADER: &str = "e,method,total_error,total_error_pct_range,localized_count,node_count";

/// Writes the results CSV sorted by `(e, method)`. Cells with no localized
/// node leave both error columns empty.
pub fn emit_results<W: Write>(records: &[SweepRecord], mut sink: W) -> Result<()> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.e.total_cmp(&b.e).then(a.method.cmp(&b.method)));
    writeln!(sink, "{RESULTS_HEADER}")?;
    for r in sorted {
        writeln!(
            sink,
            "{},{},{},{},{},{}",
            sig9(r.e),
            r.method,
            r.total_error.map(sig9).unwrap_or_default(),
            r.total_error_pct_range.map(sig9).unwrap_or_default(),
            r.localized_count,
            r.node_count
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Per-node detail CSV: `e,method,node,attempts,error_distance`.
pub fn emit_node_details<W: Write>(nodes: &[NodeDetail], mut sink: W) -> Result<()> {
    writeln!(sink, "e,method,node,attempts,error_distance")?;
    for d in nodes {
        writeln!(
            sink,
            "{},{},{},{},{}",
            sig9(d.e),
            d.result.method,
            d.result.node,
            d.result.attempts,
            d.result.error_distance().map(sig9).unwrap_or_default()
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Two-column `e,total_error_pct_range` series for one method.
pub fn emit_plot_data<W: Write>(records: &[SweepRecord], method: Method, mut sink: W) -> Result<()> {
    writeln!(sink, "e,total_error_pct_range")?;
    let mut rows: Vec<&SweepRecord> = records.iter().filter(|r| r.method == method).collect();
    rows.sort_by(|a, b| a.e.total_cmp(&b.e));
    for r in rows {
        writeln!(sink, "{},{}", sig9(r.e), r.total_error_pct_range.map(sig9).unwrap_or_default())?;
    }
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;
    use rand::rngs::mock::StepRng;

    fn link(anchor: usize, position: Point2, node: Point2) -> AnchorLink {
        AnchorLink { anchor, position, true_distance: position.distance(node) }
    }

    #[test]
    fn exact_ranges_give_zero_error_for_method3() {
        let node = Point2::new(1.0, 1.0);
        let anchors: Vec<_> = [Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 3.0)]
            .into_iter()
            .enumerate()
            .map(|(k, p)| link(k, p, node))
            .collect();
        let model = ErrorModel::new(ErrorKind::Random, 0.0, 1.0).unwrap();
        let r = localize_node(0, node, &anchors, &model, Method::M3, &ClusterOptions::default(), 50, |a| {
            rng::substream(1, 0, 0, a.into())
        })
        .unwrap();
        assert_eq!(r.attempts, 1);
        assert!(r.error_distance().unwrap() <= 1e-8);
    }

    #[test]
    fn two_anchors_are_not_localizable() {
        let node = Point2::new(0.5, 0.5);
        let anchors = vec![link(0, Point2::ORIGIN, node), link(1, Point2::new(1.0, 0.0), node)];
        let model = ErrorModel::new(ErrorKind::Random, 0.1, 1.0).unwrap();
        let r = localize_node(0, node, &anchors, &model, Method::M2, &ClusterOptions::default(), 50, |_| {
            StepRng::new(0, 0)
        })
        .unwrap();
        assert_eq!(r.attempts, 0);
        assert!(!r.is_localized());
    }

    #[test]
    fn retries_after_empty_cluster() {
        // anchors at unit distance, 120 degrees apart: shrinking every range by
        // 20% leaves no pair intersecting (sum 1.6 < sqrt(3))
        let node = Point2::ORIGIN;
        let anchors: Vec<_> = (0..3)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 3.0;
                link(k, Point2::new(a.cos(), a.sin()), node)
            })
            .collect();
        let model = ErrorModel::new(ErrorKind::Random, 0.2, 1.0).unwrap();
        // attempt 0: every uniform ~1 -> magnitude ~e, sign Minus
        // attempt 1: every uniform 0 -> exact ranges
        let scripted = |attempt: u32| {
            if attempt == 0 {
                StepRng::new(u64::MAX, 0)
            } else {
                StepRng::new(0, 0)
            }
        };
        for method in Method::ALL {
            let r = localize_node(0, node, &anchors, &model, method, &ClusterOptions::default(), 50, scripted)
                .unwrap();
            assert_eq!(r.attempts, 2, "{method}");
            assert!(r.error_distance().unwrap() < 1e-8, "{method}");
        }
        let exhausted = localize_node(0, node, &anchors, &model, Method::M1, &ClusterOptions::default(), 3, |_| {
            StepRng::new(u64::MAX, 0)
        })
        .unwrap();
        assert_eq!(exhausted.attempts, 4);
        assert!(!exhausted.is_localized());
    }

    #[test]
    fn sweep_grid_has_both_endpoints() {
        let cfg = SweepConfig::default();
        let values: Vec<_> = cfg.e_values().collect();
        assert_eq!(values.len(), 201);
        assert_eq!(values[0].1, 0.0);
        assert!((values[200].1 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let ok = SweepConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SweepConfig { e_step: 0.0, ..ok.clone() }.validate().is_err());
        assert!(SweepConfig { steps: 0, ..ok.clone() }.validate().is_err());
        assert!(SweepConfig { e_start: -0.1, ..ok.clone() }.validate().is_err());
        assert!(SweepConfig { e_step: 0.01, ..ok.clone() }.validate().is_err());
        assert!(SweepConfig { methods: vec![], ..ok }.validate().is_err());
    }

    #[test]
    fn empty_cells_have_no_error() {
        let cfg = NetworkConfig { width: 1.0, height: 1.0, node_count: 3, radius: 0.01, seed: 1 };
        let topo = NetworkTopology::generate(cfg).unwrap();
        let sweep = SweepConfig { steps: 1, ..SweepConfig::default() };
        let records = run_sweep(&topo, &sweep).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.localized_count == 0 && r.total_error.is_none()));
    }

    #[test]
    fn results_csv_layout() {
        let mut buf = Vec::new();
        emit_results(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{RESULTS_HEADER}\n"));

        let rec = SweepRecord {
            e: 0.0,
            e_index: 0,
            method: Method::M3,
            total_error: Some(0.0),
            total_error_pct_range: Some(0.0),
            localized_count: 100,
            node_count: 100,
        };
        let mut buf = Vec::new();
        emit_results(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1], "0.00000000e0,M3,0.00000000e0,0.00000000e0,100,100");
    }

    #[test]
    fn results_sorted_by_e_then_method() {
        let mk = |e: f64, method| SweepRecord {
            e,
            e_index: 0,
            method,
            total_error: None,
            total_error_pct_range: None,
            localized_count: 0,
            node_count: 1,
        };
        let mut buf = Vec::new();
        emit_results(&[mk(0.002, Method::M1), mk(0.001, Method::M3), mk(0.001, Method::M1)], &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let keys: Vec<(&str, &str)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let mut f = l.split(',');
                (f.next().unwrap(), f.next().unwrap())
            })
            .collect();
        assert_eq!(
            keys,
            vec![("1.00000000e-3", "M1"), ("1.00000000e-3", "M3"), ("2.00000000e-3", "M1")]
        );
        assert!(text.lines().all(|l| l.split(',').count() == 6));
    }
}
