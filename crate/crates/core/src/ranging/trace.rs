//! RSSI trace files.
//!
//! A trace is a CSV with header `station_id,location_id,true_distance,rssi`,
//! one received message per row. Ingestion averages the RSSI of every
//! `(station_id, location_id)` group.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{distance_from_rssi, rssi_from_distance, ShadowingParams};
use crate::{Error, Result};

pub const TRACE_HEADER: [&str; 4] = ["station_id", "location_id", "true_distance", "rssi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssiSample {
    pub station_id: String,
    pub location_id: String,
    /// Meters.
    pub true_distance: f64,
    /// dBm.
    pub rssi: f64,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn csv_err(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            parse_err(line, format!("expected {expected_len} fields, found {len}"))
        }
        csv::ErrorKind::Utf8 { err, .. } => parse_err(line, err.to_string()),
        other => parse_err(line, format!("{other:?}")),
    }
}

/// Reads a trace and returns one averaged sample per `(station, location)`
/// pair, in first-appearance order.
///
/// The group's `true_distance` is taken from its first row.
pub fn ingest_rssi_trace<R: Read>(source: R) -> Result<Vec<RssiSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(parse_err(1, "empty trace"));
    }
    if headers.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(parse_err(
            1,
            format!("expected header '{}'", TRACE_HEADER.join(",")),
        ));
    }

    struct Group {
        sample: RssiSample,
        rssi_sum: f64,
        count: usize,
    }
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    let mut groups: Vec<Group> = Vec::new();

    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or_default();
        let number = |i: usize| -> Result<f64> {
            let raw = field(i);
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_err(line, format!("{}: not a number '{raw}'", TRACE_HEADER[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("{}: not finite", TRACE_HEADER[i])))
            }
        };
        let (station, location) = (field(0), field(1));
        if station.is_empty() || location.is_empty() {
            return Err(parse_err(line, "empty identifier"));
        }
        let true_distance = number(2)?;
        if true_distance < 0.0 {
            return Err(parse_err(line, "true_distance is negative"));
        }
        let rssi = number(3)?;

        let key = (station.to_owned(), location.to_owned());
        match index.get(&key) {
            Some(&g) => {
                groups[g].rssi_sum += rssi;
                groups[g].count += 1;
            }
            None => {
                index.insert(key, groups.len());
                groups.push(Group {
                    sample: RssiSample {
                        station_id: station.to_owned(),
                        location_id: location.to_owned(),
                        true_distance,
                        rssi,
                    },
                    rssi_sum: rssi,
                    count: 1,
                });
            }
        }
    }

    if groups.is_empty() {
        return Err(parse_err(1, "trace contains no samples"));
    }
    Ok(groups
        .into_iter()
        .map(|g| RssiSample {
            rssi: g.rssi_sum / g.count as f64,
            ..g.sample
        })
        .collect())
}

pub fn write_trace<W: Write>(samples: &[RssiSample], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for s in samples {
        w.serialize(s).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Layout of a generated trace: every station hears every location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticTrace {
    pub stations: usize,
    pub locations: usize,
    pub messages_per_location: usize,
    /// Meters; locations are spaced evenly on `[min_distance, max_distance]`.
    pub min_distance: f64,
    pub max_distance: f64,
}

impl Default for SyntheticTrace {
    fn default() -> Self {
        SyntheticTrace {
            stations: 6,
            locations: 82,
            messages_per_location: 200,
            min_distance: 0.5,
            max_distance: 20.0,
        }
    }
}

impl SyntheticTrace {
    pub fn validate(&self) -> Result<()> {
        if self.stations == 0 || self.locations == 0 || self.messages_per_location == 0 {
            return Err(Error::invalid("synthetic trace counts must be positive"));
        }
        if !(self.min_distance > 0.0 && self.max_distance >= self.min_distance) {
            return Err(Error::invalid(
                "synthetic trace needs 0 < min_distance <= max_distance",
            ));
        }
        Ok(())
    }

    fn distance(&self, location: usize) -> f64 {
        if self.locations == 1 {
            return self.min_distance;
        }
        let t = location as f64 / (self.locations - 1) as f64;
        self.min_distance + t * (self.max_distance - self.min_distance)
    }
}

/// Raw per-message rows drawn from the shadowing model with `sigma` noise.
pub fn synthetic_trace<R: Rng + ?Sized>(
    params: &ShadowingParams,
    layout: &SyntheticTrace,
    rng: &mut R,
) -> Result<Vec<RssiSample>> {
    params.validate()?;
    layout.validate()?;
    let mut rows =
        Vec::with_capacity(layout.stations * layout.locations * layout.messages_per_location);
    for station in 0..layout.stations {
        for location in 0..layout.locations {
            let d = layout.distance(location);
            for _ in 0..layout.messages_per_location {
                rows.push(RssiSample {
                    station_id: format!("s{station}"),
                    location_id: format!("l{location}"),
                    true_distance: d,
                    rssi: rssi_from_distance(params, d, Some(&mut *rng))?,
                });
            }
        }
    }
    Ok(rows)
}

/// `(true_distance, estimated_distance)` for each averaged sample.
pub fn distance_curve(samples: &[RssiSample], params: &ShadowingParams) -> Vec<(f64, f64)> {
    samples
        .iter()
        .map(|s| (s.true_distance, distance_from_rssi(params, s.rssi)))
        .collect()
}

pub fn write_distance_curve<W: Write>(curve: &[(f64, f64)], mut sink: W) -> Result<()> {
    writeln!(sink, "true_distance,estimated_distance")?;
    for (t, est) in curve {
        writeln!(sink, "{t},{est}")?;
    }
    sink.flush()?;
    Ok(())
}
