use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use multilat::clustering::candidate_pairs;
use multilat::harness::{self, emit_node_details, emit_plot_data, emit_results, localize_node_detailed};
use multilat::ranging::{distance_curve, ingest_rssi_trace, synthetic_trace, write_distance_curve, write_trace};
use multilat::{rng, ErrorKind, ErrorModel, Method, NetworkTopology, Sign};

use crate::config::Config;
use crate::error::{code, CliError};
use crate::output::OutputDir;

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))
}

/// Loads the saved topology named by `topology`, or generates one from the
/// `network` section.
pub fn topology(cfg: &Config) -> Result<NetworkTopology, CliError> {
    match &cfg.topology {
        Some(stem) => {
            let csv = open(&stem.with_extension("csv"))?;
            let json = open(&stem.with_extension("json"))?;
            NetworkTopology::import(csv, json).map_err(|e| {
                CliError::validation(format!("topology {}: {e}", stem.display()))
            })
        }
        None => Ok(NetworkTopology::generate(cfg.network.resolve()?)?),
    }
}

pub fn generate(cfg: &Config, out: &OutputDir) -> Result<(), CliError> {
    let network = cfg.network.resolve()?;
    out.claim(&["topology.csv".into(), "topology.json".into()])?;
    let topo = NetworkTopology::generate(network)?;
    topo.export(out.create("topology.csv")?, out.create("topology.json")?)?;
    println!("radius: {}", topo.radius());
    println!("mean connectivity: {:.4}", topo.mean_connectivity());
    println!("min degree: {}", topo.min_degree());
    Ok(())
}

fn plot_name(m: Method) -> String {
    format!("plot_{m}.csv")
}

pub fn sweep(cfg: &Config, out: &OutputDir, plot_data: bool, node_detail: bool) -> Result<(), CliError> {
    cfg.sweep.validate()?;
    let topo = topology(cfg)?;

    let mut methods = cfg.sweep.methods.clone();
    methods.sort();
    methods.dedup();
    let mut names = vec!["results.csv".to_string()];
    if plot_data {
        names.extend(methods.iter().map(|&m| plot_name(m)));
    }
    if node_detail {
        names.push("nodes.csv".into());
    }
    out.claim(&names)?;

    let run = harness::run_sweep_detailed(&topo, &cfg.sweep, node_detail)?;
    emit_results(&run.records, out.create("results.csv")?)?;
    if plot_data {
        for &m in &methods {
            emit_plot_data(&run.records, m, out.create(&plot_name(m))?)?;
        }
    }
    if node_detail {
        emit_node_details(&run.nodes, out.create("nodes.csv")?)?;
    }
    println!(
        "radius {} mean connectivity {:.4}: {} rows",
        topo.radius(),
        topo.mean_connectivity(),
        run.records.len()
    );
    Ok(())
}

pub fn localize_one(cfg: &Config, out: &OutputDir) -> Result<(), CliError> {
    let sweep = &cfg.sweep;
    sweep.validate()?;
    let (node, e_index) = (cfg.localize.node, cfg.localize.e_index);
    if e_index > sweep.steps {
        return Err(CliError::validation(format!(
            "e_index {e_index} is beyond the sweep grid (steps = {})",
            sweep.steps
        )));
    }
    let topo = topology(cfg)?;
    if node >= topo.node_count() {
        return Err(CliError::topology(format!(
            "node {node} does not exist ({} nodes)",
            topo.node_count()
        )));
    }
    let anchors = topo.anchors_of(node);
    if anchors.len() < 3 {
        return Err(CliError::topology(format!(
            "node {node} has {} neighbours; at least 3 are needed",
            anchors.len()
        )));
    }

    let mut methods = sweep.methods.clone();
    methods.sort();
    methods.dedup();
    let name = |m: Method| format!("localize_{node}_{m}.csv");
    out.claim(&methods.iter().map(|&m| name(m)).collect::<Vec<_>>())?;

    let e = sweep.e_value(e_index);
    let model = ErrorModel::new(sweep.error_model, e, sweep.max_range.unwrap_or(topo.radius()))?;
    let truth = topo.position(node);
    for m in methods {
        let (result, detail) = localize_node_detailed(
            node,
            truth,
            &anchors,
            &model,
            m,
            &sweep.cluster,
            sweep.max_retries,
            |attempt| rng::substream(sweep.seed, e_index.into(), node as u64, attempt.into()),
        )?;
        let detail = detail.expect("at least one attempt with 3 anchors");
        let mut w = out.create(&name(m))?;

        writeln!(w, "ANCHORS\nx,y,est_radius")?;
        for c in &detail.circles {
            writeln!(w, "{},{},{}", c.center.x, c.center.y, c.radius)?;
        }
        writeln!(w, "POINTS\nx,y,pair_i,pair_j,chosen")?;
        for pair in candidate_pairs(&detail.circles).pairs {
            for (slot, p) in pair.points() {
                let chosen = detail
                    .cluster
                    .as_ref()
                    .is_some_and(|c| c.contains((pair.i, pair.j), slot));
                writeln!(w, "{},{},{},{},{}", p.x, p.y, pair.i, pair.j, u8::from(chosen))?;
            }
        }
        writeln!(w, "ESTIMATE\nx,y")?;
        if let Some(est) = result.estimated() {
            writeln!(w, "{},{}", est.x, est.y)?;
        }
        writeln!(w, "TRUE\nx,y\n{},{}", truth.x, truth.y)?;
        w.flush()?;

        match result.error_distance() {
            Some(err) => println!("{m}: error {err:.6e} after {} attempt(s)", result.attempts),
            None => println!("{m}: not localized after {} attempt(s)", result.attempts),
        }
    }
    Ok(())
}

pub fn error_models(cfg: &Config, out: &OutputDir) -> Result<(), CliError> {
    let s = &cfg.error_models;
    if s.samples < 2 {
        return Err(CliError::validation("samples must be at least 2"));
    }
    let models = ErrorKind::ALL
        .into_iter()
        .map(|k| ErrorModel::new(k, s.e, s.max_range))
        .collect::<Result<Vec<_>, _>>()?;
    let name = |k: ErrorKind| format!("error_model_{k}.csv");
    out.claim(&ErrorKind::ALL.map(name))?;

    for model in models {
        let mut rng = rng::seeded(s.seed);
        let mut w = out.create(&name(model.kind()))?;
        writeln!(w, "real_distance,estimated_distance")?;
        for i in 0..s.samples {
            let real = s.max_range * i as f64 / (s.samples - 1) as f64;
            let est = model.apply(real, &mut rng, Sign::Plus)?;
            writeln!(w, "{real},{est}")?;
        }
        w.flush()?;
    }
    println!("wrote {} curves with {} samples each", ErrorKind::ALL.len(), s.samples);
    Ok(())
}

fn trace_error(source: &Path, err: multilat::Error) -> CliError {
    match err {
        multilat::Error::Parse { .. } => {
            CliError::new(code::TRACE_PARSE, format!("{}: {err}", source.display()))
        }
        other => other.into(),
    }
}

pub fn rssi(cfg: &Config, out: &OutputDir, synthetic: bool) -> Result<(), CliError> {
    let r = &cfg.rssi;
    r.shadowing.validate()?;
    let mut names = vec!["distance_curve.csv".to_string()];
    let source = if synthetic {
        r.synthetic.validate()?;
        names.push("synthetic_trace.csv".into());
        out.path("synthetic_trace.csv")
    } else {
        r.trace
            .clone()
            .ok_or_else(|| CliError::validation("rssi needs a trace file or --synthetic"))?
    };
    out.claim(&names)?;

    if synthetic {
        let rows = synthetic_trace(&r.shadowing, &r.synthetic, &mut rng::seeded(r.seed))?;
        write_trace(&rows, out.create("synthetic_trace.csv")?)?;
    }
    let samples = ingest_rssi_trace(open(&source)?).map_err(|e| trace_error(&source, e))?;
    let curve = distance_curve(&samples, &r.shadowing);
    write_distance_curve(&curve, out.create("distance_curve.csv")?)?;
    println!("{} averaged samples", curve.len());
    Ok(())
}

