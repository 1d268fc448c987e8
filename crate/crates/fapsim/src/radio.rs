//! Link budget: SNR over distance, MCS capacity lookup, and target-SNR
//! distance inversion.
//!
//! Propagation is free-space path loss; the crowd/disaster deployments this
//! targets are open areas. A configurable path-loss exponent would slot in
//! here as an extension point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radio parameters of the access-point link.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    /// Margin added on top of target SNRs for reliable operation.
    pub snr_margin_db: f64,
    pub frequency_mhz: f64,
    pub standard: String,
    pub channel_bandwidth_mhz: f64,
    pub guard_interval_ns: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            noise_power_dbm: -85.0,
            snr_margin_db: 1.0,
            frequency_mhz: 5250.0,
            standard: "802.11ac".to_string(),
            channel_bandwidth_mhz: 160.0,
            guard_interval_ns: 800.0,
        }
    }
}

/// One modulation-and-coding-scheme entry.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McsEntry {
    pub mcs: u8,
    pub min_snr_db: f64,
    pub rate_mbps: f64,
}

/// Ordered MCS table: thresholds and rates must increase strictly with index.
#[derive(Debug, Clone)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

/// Default single-stream table for a 160 MHz channel with 800 ns guard
/// interval; thresholds are relative to the default noise floor. Ships as
/// data so deployments can swap their own column in.
const DEFAULT_TABLE_CSV: &str = include_str!("../data/mcs_table.csv");

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("MCS table is empty".into()));
        }
        for pair in entries.windows(2) {
            if pair[1].min_snr_db <= pair[0].min_snr_db {
                return Err(Error::Validation(format!(
                    "MCS {} threshold {} does not exceed MCS {} threshold {}",
                    pair[1].mcs, pair[1].min_snr_db, pair[0].mcs, pair[0].min_snr_db
                )));
            }
            if pair[1].rate_mbps <= pair[0].rate_mbps {
                return Err(Error::Validation(format!(
                    "MCS {} rate {} does not exceed MCS {} rate {}",
                    pair[1].mcs, pair[1].rate_mbps, pair[0].mcs, pair[0].rate_mbps
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn default_table() -> Self {
        Self::from_csv_reader(DEFAULT_TABLE_CSV.as_bytes()).expect("embedded table is valid")
    }

    /// Reads `mcs,min_snr_db,rate_mbps` rows.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
        let expected = ["mcs", "min_snr_db", "rate_mbps"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse(format!(
                "MCS table header must be `mcs,min_snr_db,rate_mbps`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for rec in rdr.deserialize() {
            let entry: McsEntry = rec.map_err(|e| Error::Parse(e.to_string()))?;
            entries.push(entry);
        }
        Self::new(entries)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn top_rate_mbps(&self) -> f64 {
        self.entries.last().unwrap().rate_mbps
    }
}

/// Free-space path loss in dB for distance `d` (m) at frequency `f` (MHz).
pub fn path_loss(d: f64, f: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter {
            name: "distance",
            reason: format!("must be positive, got {d}"),
        });
    }
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidParameter {
            name: "frequency",
            reason: format!("must be positive, got {f}"),
        });
    }
    Ok(20.0 * d.log10() + 20.0 * f.log10() - 27.55)
}

/// SNR of a link at distance `d`.
pub fn snr_at(d: f64, budget: &LinkBudget) -> Result<f64> {
    Ok(budget.tx_power_dbm - path_loss(d, budget.frequency_mhz)? - budget.noise_power_dbm)
}

/// Data rate of the highest MCS whose threshold the SNR meets; 0 below the
/// lowest threshold.
pub fn capacity_for_snr(snr_db: f64, table: &McsTable) -> f64 {
    let mut rate = 0.0;
    for e in table.entries() {
        if snr_db >= e.min_snr_db {
            rate = e.rate_mbps;
        } else {
            break;
        }
    }
    rate
}

/// Largest distance at which the link still delivers `target_snr_db` plus the
/// budget's margin. Closed-form inversion of the path-loss model.
pub fn max_distance_for_snr(target_snr_db: f64, budget: &LinkBudget) -> Result<f64> {
    if !target_snr_db.is_finite() {
        return Err(Error::InvalidParameter {
            name: "target_snr_db",
            reason: format!("must be finite, got {target_snr_db}"),
        });
    }
    let allowed_pl = budget.tx_power_dbm
        - budget.noise_power_dbm
        - (target_snr_db + budget.snr_margin_db);
    let exponent = (allowed_pl + 27.55 - 20.0 * budget.frequency_mhz.log10()) / 20.0;
    let d = 10f64.powf(exponent);
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Validation(format!(
            "target SNR {target_snr_db} dB unreachable at any positive distance"
        )));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> LinkBudget {
        LinkBudget::default()
    }

    #[test]
    fn path_loss_reference_and_decades() {
        // hand evaluation: 20·log10(5250) − 27.55
        let pl1 = path_loss(1.0, 5250.0).unwrap();
        assert!((pl1 - (20.0 * 5250f64.log10() - 27.55)).abs() < 1e-12);
        assert!((pl1 - 46.85).abs() < 5e-3, "PL(1 m) = {pl1}");
        let pl10 = path_loss(10.0, 5250.0).unwrap();
        let pl100 = path_loss(100.0, 5250.0).unwrap();
        assert!((pl10 - pl1 - 20.0).abs() < 1e-12);
        assert!((pl100 - pl10 - 20.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_rejects_non_positive_distance() {
        assert!(path_loss(0.0, 5250.0).is_err());
        assert!(path_loss(-5.0, 5250.0).is_err());
    }

    #[test]
    fn snr_reference_points() {
        let b = budget();
        let s10 = snr_at(10.0, &b).unwrap();
        assert!((s10 - 38.15).abs() < 5e-3, "snr(10) = {s10}");
        let s100 = snr_at(100.0, &b).unwrap();
        assert!((s100 - 18.15).abs() < 5e-3, "snr(100) = {s100}");
        // budget exhaustion: at PL = 105 dB the SNR crosses zero
        let d = 10f64.powf((105.0 - (20.0 * 5250f64.log10() - 27.55)) / 20.0);
        let s = snr_at(d, &b).unwrap();
        assert!(s.abs() < 1e-9, "snr at exhaustion = {s}");
    }

    #[test]
    fn capacity_thresholds() {
        let t = McsTable::default_table();
        // brute-force scan over all entries as the oracle
        let oracle = |snr: f64| {
            t.entries()
                .iter()
                .filter(|e| e.min_snr_db <= snr)
                .map(|e| e.rate_mbps)
                .fold(0.0, f64::max)
        };
        for snr in [-5.0, 12.99, 13.0, 20.5, 37.9, 38.0, 38.15, 60.0] {
            assert_eq!(capacity_for_snr(snr, &t), oracle(snr), "snr = {snr}");
        }
        let top = t.entries().last().unwrap();
        assert_eq!(capacity_for_snr(top.min_snr_db, &t), top.rate_mbps);
        let bottom = t.entries().first().unwrap();
        assert_eq!(capacity_for_snr(bottom.min_snr_db - 0.1, &t), 0.0);
        assert_eq!(capacity_for_snr(38.15, &t), 866.7);
    }

    #[test]
    fn max_distance_round_trip() {
        let b = budget();
        for target in [5.0, 13.0, 21.0, 38.0] {
            let d = max_distance_for_snr(target, &b).unwrap();
            let achieved = snr_at(d, &b).unwrap();
            assert!(
                (achieved - b.snr_margin_db - target).abs() < 1e-6,
                "target {target}: snr(d)={achieved}"
            );
        }
    }

    #[test]
    fn max_distance_reference_points() {
        let b = budget();
        let d = max_distance_for_snr(37.15, &b).unwrap();
        assert!((d - 10.0).abs() < 0.01, "d = {d}");
        // margin-free FSPL inversion: PL budget of 66.85 dB is 10 m
        let mut b0 = budget();
        b0.snr_margin_db = 0.0;
        let target = b0.tx_power_dbm - b0.noise_power_dbm - 66.85;
        let d = max_distance_for_snr(target, &b0).unwrap();
        assert!((d - 10.0).abs() < 0.01, "d = {d}");
    }

    #[test]
    fn six_db_halves_distance() {
        let b = budget();
        let d1 = max_distance_for_snr(20.0, &b).unwrap();
        let d2 = max_distance_for_snr(26.0, &b).unwrap();
        assert!((d2 / d1 - 10f64.powf(-0.3)).abs() < 1e-12);
        assert!((d2 / d1 - 0.5).abs() < 2e-3);
    }

    #[test]
    fn default_table_shape() {
        let t = McsTable::default_table();
        assert_eq!(t.entries().len(), 10);
        assert_eq!(t.top_rate_mbps(), 866.7);
        assert_eq!(t.entries()[0].mcs, 0);
        assert_eq!(t.entries()[4].rate_mbps, 390.0);
    }

    #[test]
    fn table_validation_rejects_disorder() {
        let bad_snr = vec![
            McsEntry { mcs: 0, min_snr_db: 10.0, rate_mbps: 65.0 },
            McsEntry { mcs: 1, min_snr_db: 9.0, rate_mbps: 130.0 },
        ];
        assert!(McsTable::new(bad_snr).is_err());
        let bad_rate = vec![
            McsEntry { mcs: 0, min_snr_db: 10.0, rate_mbps: 65.0 },
            McsEntry { mcs: 1, min_snr_db: 12.0, rate_mbps: 65.0 },
        ];
        assert!(McsTable::new(bad_rate).is_err());
        assert!(McsTable::new(vec![]).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let csv = "mcs,min_snr_db,rate_mbps\n0,13,65\n1,16,130\n";
        let t = McsTable::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(t.entries().len(), 2);
        assert_eq!(t.entries()[1].rate_mbps, 130.0);
        let bad = "index,snr,rate\n0,13,65\n";
        assert!(McsTable::from_csv_reader(bad.as_bytes()).is_err());
    }

    #[test]
    fn snr_strictly_decreasing_in_distance() {
        let b = budget();
        let mut prev = f64::INFINITY;
        for d in [1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1000.0] {
            let s = snr_at(d, &b).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn max_distance_strictly_decreasing_in_target() {
        let b = budget();
        let mut prev = f64::INFINITY;
        for t in [0.0, 5.0, 13.0, 25.0, 38.0] {
            let d = max_distance_for_snr(t, &b).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }
}
