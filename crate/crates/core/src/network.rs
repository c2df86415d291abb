//! Random Unit Disc Graph networks.
//!
//! Node `k` is placed at `(width * u_{2k}, height * u_{2k+1})` where `u_i` is
//! the `i`-th `f64` drawn from `ChaCha8Rng::seed_from_u64(seed)` via
//! `rand`'s standard uniform `[0, 1)` conversion. Two distinct nodes are
//! linked iff their distance is at most `radius`; there is no wrap-around.

use std::io::{BufRead, Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Point2, Result};

/// Communication radii printed for the four reference networks.
pub const REFERENCE_RADII: [f64; 4] = [0.04, 0.05, 0.06, 0.07];
/// Mean connectivities printed for the four reference networks.
pub const REFERENCE_MEANS: [f64; 4] = [4.582, 7.199, 10.394, 13.96];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub width: f64,
    pub height: f64,
    pub node_count: usize,
    pub radius: f64,
    pub seed: u64,
}

impl NetworkConfig {
    /// Unit square with 100 nodes.
    pub fn unit_square(radius: f64, seed: u64) -> Self {
        NetworkConfig { width: 1.0, height: 1.0, node_count: 100, radius, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name}={v} must be positive")))
            }
        };
        positive("width", self.width)?;
        positive("height", self.height)?;
        positive("radius", self.radius)?;
        if self.node_count == 0 {
            return Err(Error::invalid("node_count must be at least 1"));
        }
        Ok(())
    }
}

/// A neighbour acting as an anchor, with the exact range to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorLink {
    pub anchor: usize,
    pub position: Point2,
    pub true_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    config: NetworkConfig,
    positions: Vec<Point2>,
    adjacency: Vec<Vec<usize>>,
}

impl NetworkTopology {
    /// Draws node positions from the config seed and links them.
    pub fn generate(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = rng::seeded(config.seed);
        let positions = (0..config.node_count)
            .map(|_| {
                let x = config.width * rng.gen::<f64>();
                let y = config.height * rng.gen::<f64>();
                Point2::new(x, y)
            })
            .collect();
        Ok(Self::link(config, positions))
    }

    /// Builds a topology from given positions; `config.node_count` must
    /// match and every position must lie inside the area.
    pub fn from_positions(config: NetworkConfig, positions: Vec<Point2>) -> Result<Self> {
        config.validate()?;
        if positions.len() != config.node_count {
            return Err(Error::invalid(format!(
                "node_count={} but {} positions given",
                config.node_count,
                positions.len()
            )));
        }
        for (k, p) in positions.iter().enumerate() {
            let inside = (0.0..=config.width).contains(&p.x) && (0.0..=config.height).contains(&p.y);
            if !inside {
                return Err(Error::invalid(format!("node {k} at ({}, {}) outside the area", p.x, p.y)));
            }
        }
        Ok(Self::link(config, positions))
    }

    fn link(config: NetworkConfig, positions: Vec<Point2>) -> Self {
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if positions[i].distance(positions[j]) <= config.radius {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        NetworkTopology { config, positions, adjacency }
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn radius(&self) -> f64 {
        self.config.radius
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn position(&self, node: usize) -> Point2 {
        self.positions[node]
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sum of degrees over node count.
    pub fn mean_connectivity(&self) -> f64 {
        let degrees: usize = self.adjacency.iter().map(Vec::len).sum();
        degrees as f64 / self.node_count() as f64
    }

    /// Every neighbour of `node` with its exact distance.
    pub fn anchors_of(&self, node: usize) -> Vec<AnchorLink> {
        let here = self.positions[node];
        self.adjacency[node]
            .iter()
            .map(|&k| AnchorLink {
                anchor: k,
                position: self.positions[k],
                true_distance: here.distance(self.positions[k]),
            })
            .collect()
    }

    /// Writes `node_id,x,y` rows and the JSON config header. Coordinates use
    /// shortest round-trip formatting, so a reload reproduces the topology
    /// exactly.
    pub fn export<C: Write, J: Write>(&self, mut csv_sink: C, mut json_sink: J) -> Result<()> {
        serde_json::to_writer_pretty(&mut json_sink, &self.config)?;
        writeln!(json_sink)?;
        json_sink.flush()?;
        writeln!(csv_sink, "node_id,x,y")?;
        for (k, p) in self.positions.iter().enumerate() {
            writeln!(csv_sink, "{k},{},{}", p.x, p.y)?;
        }
        csv_sink.flush()?;
        Ok(())
    }

    pub fn import<C: BufRead, J: Read>(csv_source: C, json_source: J) -> Result<Self> {
        let config: NetworkConfig = serde_json::from_reader(json_source)?;
        let mut lines = csv_source.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == "node_id,x,y" => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => {
                return Err(Error::Parse { line: 1, message: "expected header 'node_id,x,y'".into() })
            }
        }
        let mut positions = Vec::with_capacity(config.node_count);
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx as u64 + 1;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse { line: lineno, message: m.to_owned() };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad("expected 3 fields"));
            }
            let id: usize = fields[0].parse().map_err(|_| bad("bad node_id"))?;
            if id != positions.len() {
                return Err(bad("node ids must be consecutive from 0"));
            }
            let x: f64 = fields[1].parse().map_err(|_| bad("bad x"))?;
            let y: f64 = fields[2].parse().map_err(|_| bad("bad y"))?;
            positions.push(Point2::try_new(x, y).map_err(|_| bad("non-finite coordinate"))?);
        }
        Self::from_positions(config, positions)
    }
}

/// Smallest radius whose mean connectivity, averaged over the networks
/// drawn from `seeds`, reaches `target_mean`.
pub fn calibrate_radius(
    width: f64,
    height: f64,
    node_count: usize,
    target_mean: f64,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<f64> {
    let probe = NetworkConfig { width, height, node_count, radius: 1.0, seed: 0 };
    probe.validate()?;
    if node_count < 2 || !(target_mean > 0.0 && target_mean <= (node_count - 1) as f64) {
        return Err(Error::invalid(format!(
            "target mean {target_mean} unreachable with {node_count} nodes"
        )));
    }

    // positions do not depend on the radius: keep sorted pair distances
    let samples: Vec<Vec<f64>> = seeds
        .into_iter()
        .map(|seed| {
            let mut rng = rng::seeded(seed);
            let pts: Vec<Point2> = (0..node_count)
                .map(|_| {
                    let x = width * rng.gen::<f64>();
                    let y = height * rng.gen::<f64>();
                    Point2::new(x, y)
                })
                .collect();
            let mut d: Vec<f64> = (0..node_count)
                .flat_map(|i| (i + 1..node_count).map(move |j| (i, j)))
                .map(|(i, j)| pts[i].distance(pts[j]))
                .collect();
            d.sort_by(f64::total_cmp);
            d
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::invalid("calibration needs at least one seed"));
    }

    let mean_at = |r: f64| {
        samples
            .iter()
            .map(|d| 2.0 * d.partition_point(|&x| x <= r) as f64 / node_count as f64)
            .sum::<f64>()
            / samples.len() as f64
    };
    let (mut lo, mut hi) = (0.0, width.hypot(height));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) >= target_mean {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(radius: f64) -> NetworkTopology {
        let cfg = NetworkConfig { width: 1.0, height: 1.0, node_count: 2, radius, seed: 0 };
        NetworkTopology::from_positions(cfg, vec![Point2::new(0.0, 0.0), Point2::new(0.03, 0.0)])
            .unwrap()
    }

    #[test]
    fn udg_links_within_radius() {
        let t = pair(0.04);
        assert_eq!(t.neighbours(0), &[1]);
        assert_eq!(t.neighbours(1), &[0]);
        assert_eq!(t.mean_connectivity(), 1.0);
        assert!(pair(0.02).neighbours(0).is_empty());
    }

    #[test]
    fn isolated_nodes_have_zero_connectivity() {
        let cfg = NetworkConfig { width: 1.0, height: 1.0, node_count: 3, radius: 0.1, seed: 0 };
        let t = NetworkTopology::from_positions(
            cfg,
            vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.5), Point2::new(1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(t.mean_connectivity(), 0.0);
        assert!(t.anchors_of(1).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = NetworkConfig::unit_square(0.1, 9);
        assert_eq!(NetworkTopology::generate(cfg).unwrap(), NetworkTopology::generate(cfg).unwrap());
        let other = NetworkTopology::generate(NetworkConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(NetworkTopology::generate(cfg).unwrap().positions(), other.positions());
    }

    #[test]
    fn anchors_carry_true_distances() {
        let t = NetworkTopology::generate(NetworkConfig::unit_square(0.2, 3)).unwrap();
        for node in 0..t.node_count() {
            for link in t.anchors_of(node) {
                assert!(link.true_distance <= 0.2);
                assert!(t.neighbours(link.anchor).contains(&node));
            }
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let good = NetworkConfig::unit_square(0.1, 0);
        assert!(NetworkTopology::generate(NetworkConfig { node_count: 0, ..good }).is_err());
        assert!(NetworkTopology::generate(NetworkConfig { radius: 0.0, ..good }).is_err());
        assert!(NetworkTopology::generate(NetworkConfig { width: -1.0, ..good }).is_err());
        let cfg = NetworkConfig { node_count: 1, ..good };
        assert!(NetworkTopology::from_positions(cfg, vec![Point2::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn export_import_is_exact() {
        let t = NetworkTopology::generate(NetworkConfig::unit_square(0.15, 77)).unwrap();
        let (mut csv, mut json) = (Vec::new(), Vec::new());
        t.export(&mut csv, &mut json).unwrap();
        let back = NetworkTopology::import(csv.as_slice(), json.as_slice()).unwrap();
        assert_eq!(back, t);
        let (mut csv2, mut json2) = (Vec::new(), Vec::new());
        back.export(&mut csv2, &mut json2).unwrap();
        assert_eq!((csv, json), (csv2, json2));
    }

    #[test]
    fn import_rejects_gaps() {
        let json = serde_json::to_vec(&NetworkConfig { node_count: 2, ..NetworkConfig::unit_square(0.1, 0) })
            .unwrap();
        let csv = "node_id,x,y\n0,0.1,0.1\n2,0.2,0.2\n";
        assert!(matches!(
            NetworkTopology::import(csv.as_bytes(), json.as_slice()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn calibration_hits_target() {
        let r = calibrate_radius(1.0, 1.0, 100, 4.582, 0..32).unwrap();
        let mean: f64 = (0..32)
            .map(|s| {
                NetworkTopology::generate(NetworkConfig::unit_square(r, s))
                    .unwrap()
                    .mean_connectivity()
            })
            .sum::<f64>()
            / 32.0;
        assert!((mean - 4.582).abs() < 0.05, "r={r} mean={mean}");
        assert!(calibrate_radius(1.0, 1.0, 100, 200.0, 0..2).is_err());
    }
}
