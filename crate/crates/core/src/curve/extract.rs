//! The extraction pipeline: record → curve → smoothed curve → toe-compensated
//! fit → modulus, yield, fracture; plus per-configuration aggregation and the
//! prototype force features.

use serde::{Deserialize, Serialize};

use crate::curve::detect::{
    detect_fracture, detect_linear_region, detect_yield, refine_yield, youngs_modulus, DetectOptions,
    FractureRule,
};
use crate::curve::record::RawTestRecord;
use crate::curve::reduce::{smooth, to_stress_strain, toe_compensate, StressStrainCurve};
use crate::curve::CurveError;
use crate::model::PrintConfig;
use crate::parallel;

/// Default smoothing window [samples] applied before detection.
pub const DEFAULT_SMOOTH_WINDOW: usize = 9;
/// Default fracture drop fraction.
pub const DEFAULT_DROP_FRACTION: f64 = 0.25;
/// Half-width [samples] of the local two-segment fit that sharpens the yield.
pub const DEFAULT_REFINE_HALF_WINDOW: usize = 25;

/// The extracted compressive property quintet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionProperties {
    /// Compression modulus E_c [MPa].
    #[serde(rename = "youngs_modulus_mpa")]
    pub youngs_modulus: f64,
    /// Yield stress σ_yc [MPa]: the first stress maximum.
    #[serde(rename = "yield_stress_mpa")]
    pub yield_stress: f64,
    /// Fracture stress σ_fc [MPa].
    #[serde(rename = "fracture_stress_mpa")]
    pub fracture_stress: f64,
    /// Yield strain ε_yc [mm/mm].
    pub yield_strain: f64,
    /// Fracture strain ε_fc [mm/mm].
    pub fracture_strain: f64,
}

impl CompressionProperties {
    pub fn validate(&self) -> Result<(), CurveError> {
        let fields = [
            ("youngs_modulus", self.youngs_modulus),
            ("yield_stress", self.yield_stress),
            ("fracture_stress", self.fracture_stress),
            ("yield_strain", self.yield_strain),
            ("fracture_strain", self.fracture_strain),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(CurveError::Validation(format!(
                    "extracted {name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.fracture_strain < self.yield_strain {
            return Err(CurveError::Validation(format!(
                "fracture strain {} below yield strain {}",
                self.fracture_strain, self.yield_strain
            )));
        }
        Ok(())
    }

    fn as_array(&self) -> [f64; 5] {
        [
            self.youngs_modulus,
            self.yield_stress,
            self.fracture_stress,
            self.yield_strain,
            self.fracture_strain,
        ]
    }
}

/// Options for [`extract_properties`]. Defaults are the documented values
/// echoed into report provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub smooth_window: usize,
    pub drop_fraction: f64,
    pub refine_half_window: usize,
    pub detect: DetectOptions,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            drop_fraction: DEFAULT_DROP_FRACTION,
            refine_half_window: DEFAULT_REFINE_HALF_WINDOW,
            detect: DetectOptions::default(),
        }
    }
}

/// Everything worth auditing about one extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractDiagnostics {
    /// Strain-axis shift removed by toe compensation.
    pub toe_offset: f64,
    /// Inclusive index window of the elastic fit on the compensated curve.
    pub linear_region: (usize, usize),
    pub region_r_squared: f64,
    /// Endpoint stress/strain ratio over the region (audit companion to the
    /// least-squares modulus).
    pub modulus_endpoint_ratio_mpa: f64,
    pub fracture_rule: FractureRule,
    pub smooth_window: usize,
    pub drop_fraction: f64,
}

/// Extraction result: the quintet plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub properties: CompressionProperties,
    pub diagnostics: ExtractDiagnostics,
}

/// Runs the full reduction pipeline on one record.
///
/// Stage order: stress–strain conversion, smoothing, toe compensation,
/// linear-region detection, modulus fit, yield detection (sharpened by a
/// local two-segment fit on the unsmoothed curve), fracture detection.
/// Yield and fracture are reported on the raw strain axis; the modulus is
/// fitted on the toe-compensated curve and the applied offset is reported.
/// Stage failures carry the stage name.
pub fn extract_properties(record: &RawTestRecord, opts: &ExtractOptions) -> Result<Extraction, CurveError> {
    let raw = to_stress_strain(record).map_err(CurveError::at_stage("stress-strain"))?;
    let window = opts.smooth_window.min(largest_odd(raw.len()));
    let smoothed = smooth(&raw, window).map_err(CurveError::at_stage("smooth"))?;
    // Keep the elastic fit clear of the corner samples bent by smoothing.
    let mut detect = opts.detect;
    detect.end_guard = detect.end_guard.max(window);
    let compensated =
        toe_compensate(&smoothed, &detect).map_err(CurveError::at_stage("toe-compensation"))?;
    let region =
        detect_linear_region(&compensated, &detect).map_err(CurveError::at_stage("linear-region"))?;
    let modulus =
        youngs_modulus(&compensated, region.start, region.end).map_err(CurveError::at_stage("modulus"))?;

    let candidate = detect_yield(&smoothed, &opts.detect).map_err(CurveError::at_stage("yield"))?;
    let yield_point = refine_yield(&raw, candidate.index, opts.refine_half_window);

    let fracture = detect_fracture(
        &smoothed,
        &yield_point,
        opts.drop_fraction,
        Some(modulus.least_squares),
        &opts.detect,
    )
    .map_err(CurveError::at_stage("fracture"))?;

    let properties = CompressionProperties {
        youngs_modulus: modulus.least_squares,
        yield_stress: yield_point.stress,
        fracture_stress: fracture.stress,
        yield_strain: yield_point.strain,
        fracture_strain: fracture.strain,
    };
    properties.validate().map_err(CurveError::at_stage("properties"))?;

    Ok(Extraction {
        properties,
        diagnostics: ExtractDiagnostics {
            toe_offset: compensated.toe_offset,
            linear_region: (region.start, region.end),
            region_r_squared: modulus.r_squared,
            modulus_endpoint_ratio_mpa: modulus.endpoint_ratio,
            fracture_rule: fracture.rule,
            smooth_window: opts.smooth_window,
            drop_fraction: opts.drop_fraction,
        },
    })
}

fn largest_odd(n: usize) -> usize {
    if n % 2 == 0 {
        n.saturating_sub(1).max(1)
    } else {
        n
    }
}

/// Extracts a batch of records, one worker per record when the `parallel`
/// feature is on. Results come back in input order regardless.
pub fn extract_properties_batch(
    records: &[RawTestRecord],
    opts: &ExtractOptions,
) -> Vec<Result<Extraction, CurveError>> {
    parallel::map_ordered(records, |record| extract_properties(record, opts))
}

/// Mean and sample standard deviation of one property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std_dev: f64,
}

/// Per-configuration statistics over extracted quintets: arithmetic mean and
/// sample (n−1) standard deviation per property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub youngs_modulus: MeanStd,
    pub yield_stress: MeanStd,
    pub fracture_stress: MeanStd,
    pub yield_strain: MeanStd,
    pub fracture_strain: MeanStd,
}

/// Aggregates a non-empty list of quintets.
pub fn aggregate(props: &[CompressionProperties]) -> Result<AggregateStats, CurveError> {
    if props.is_empty() {
        return Err(CurveError::Domain("cannot aggregate an empty property list".into()));
    }
    let n = props.len();
    let mut stats = [MeanStd { mean: 0.0, std_dev: 0.0 }; 5];
    for (k, stat) in stats.iter_mut().enumerate() {
        let values: Vec<f64> = props.iter().map(|p| p.as_array()[k]).collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_dev = if n == 1 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
        };
        *stat = MeanStd { mean, std_dev };
    }
    Ok(AggregateStats {
        n,
        youngs_modulus: stats[0],
        yield_stress: stats[1],
        fracture_stress: stats[2],
        yield_strain: stats[3],
        fracture_strain: stats[4],
    })
}

/// Renders per-configuration aggregates as CSV in the property-table layout:
/// one configuration per row, mean and standard deviation per property.
pub fn aggregate_csv_string(rows: &[(PrintConfig, AggregateStats)]) -> String {
    let mut out = String::from(
        "config,axis,pattern,n,\
         youngs_modulus_mean_mpa,youngs_modulus_std_mpa,\
         yield_stress_mean_mpa,yield_stress_std_mpa,\
         fracture_stress_mean_mpa,fracture_stress_std_mpa,\
         yield_strain_mean,yield_strain_std,\
         fracture_strain_mean,fracture_strain_std\n",
    );
    for (config, stats) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            config.label(),
            config.axis,
            config.pattern,
            stats.n,
            stats.youngs_modulus.mean,
            stats.youngs_modulus.std_dev,
            stats.yield_stress.mean,
            stats.yield_stress.std_dev,
            stats.fracture_stress.mean,
            stats.fracture_stress.std_dev,
            stats.yield_strain.mean,
            stats.yield_strain.std_dev,
            stats.fracture_strain.mean,
            stats.fracture_strain.std_dev,
        ));
    }
    out
}

/// Force features of one prototype test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrototypeFeatures {
    /// Maximum compression force [N].
    pub f_max: f64,
    /// Displacement at the maximum force [mm].
    pub dl_f_max: f64,
    /// Force at the fracture instant [N].
    pub f_fracture: f64,
    /// Displacement at the fracture instant [mm].
    pub dl_fracture: f64,
}

/// Extracts the prototype force features directly from the
/// force–displacement record (no area normalization): the global force
/// maximum, and the fracture sample located by the fracture rule. A record
/// that is still rising at its end reports the terminal sample for both.
pub fn prototype_features(record: &RawTestRecord) -> Result<PrototypeFeatures, CurveError> {
    record.validate()?;
    let n = record.len();

    let mut max_i = 0;
    for i in 1..n {
        if record.samples[i].1 > record.samples[max_i].1 {
            max_i = i;
        }
    }
    let (dl_f_max, f_max) = record.samples[max_i];

    // Work on the force-displacement data as a pseudo-curve.
    let displacements: Vec<f64> = {
        let mut running = f64::NEG_INFINITY;
        record
            .samples
            .iter()
            .map(|&(d, _)| {
                running = running.max(d.max(0.0));
                running
            })
            .collect()
    };
    let forces: Vec<f64> = record.samples.iter().map(|&(_, f)| f).collect();
    let curve = StressStrainCurve::new(displacements, forces)
        .map_err(|e| CurveError::Validation(e.to_string()))?;
    let opts = ExtractOptions::default();
    let smoothed = smooth(&curve, opts.smooth_window.min(largest_odd(n)))?;

    let (f_fracture, dl_fracture) = match detect_yield(&smoothed, &opts.detect) {
        Ok(y) => {
            let fracture = detect_fracture(&smoothed, &y, opts.drop_fraction, None, &opts.detect)?;
            // Report the raw sample at the located index.
            let (d, f) = record.samples[fracture.index];
            (f, d.max(0.0))
        }
        Err(CurveError::NoYield(_)) => {
            let (d, f) = record.samples[n - 1];
            (f, d.max(0.0))
        }
        Err(other) => return Err(other),
    };

    let features = PrototypeFeatures { f_max, dl_f_max, f_fracture, dl_fracture };
    if !(features.f_max >= features.f_fracture && features.f_fracture > 0.0) {
        return Err(CurveError::Validation(format!(
            "prototype features violate F_max >= F_fc > 0: {features:?}"
        )));
    }
    if !(features.dl_fracture >= features.dl_f_max && features.dl_f_max > 0.0) {
        return Err(CurveError::Validation(format!(
            "prototype features violate dL_fc >= dL_Fmax > 0: {features:?}"
        )));
    }
    Ok(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::synth::{generate_synthetic_record, SyntheticModel};
    use crate::model::{InfillPattern, PrintAxis, SpecimenGeometry};
    use approx::assert_relative_eq;

    fn config() -> PrintConfig {
        PrintConfig::new(PrintAxis::XY, InfillPattern::Concentric)
    }

    fn table5_xy_model(noise: f64, seed: u64) -> SyntheticModel {
        SyntheticModel::from_properties(1743.5, 61.65, 0.038, 42.21, 0.076, noise, seed).unwrap()
    }

    fn extract_model(model: &SyntheticModel, n: usize) -> Extraction {
        let record =
            generate_synthetic_record(model, &SpecimenGeometry::NOMINAL, config(), n, "t").unwrap();
        extract_properties(&record, &ExtractOptions::default()).unwrap()
    }

    #[test]
    fn noise_free_round_trip_recovers_the_quintet() {
        let model = table5_xy_model(0.0, 7);
        let n = 400;
        let extraction = extract_model(&model, n);
        let p = extraction.properties;
        let spacing = model.fracture_strain / (n - 1) as f64;
        assert_relative_eq!(p.youngs_modulus, model.youngs_modulus, max_relative = 0.01);
        assert_relative_eq!(p.yield_stress, model.yield_stress, max_relative = 0.005);
        assert_relative_eq!(p.fracture_stress, model.fracture_stress(), max_relative = 0.005);
        assert!((p.yield_strain - model.yield_strain).abs() <= spacing);
        assert!((p.fracture_strain - model.fracture_strain).abs() <= spacing);
        assert_relative_eq!(
            extraction.diagnostics.toe_offset,
            model.elastic_intercept(),
            max_relative = 0.25
        );
    }

    #[test]
    fn noisy_round_trip_medians_stay_within_three_percent() {
        let mut recovered: Vec<CompressionProperties> = Vec::new();
        for seed in 0..20 {
            let model = table5_xy_model(0.5, seed);
            recovered.push(extract_model(&model, 400).properties);
        }
        let model = table5_xy_model(0.5, 0);
        let median = |mut xs: Vec<f64>| -> f64 {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            0.5 * (xs[xs.len() / 2] + xs[(xs.len() - 1) / 2])
        };
        let checks = [
            (median(recovered.iter().map(|p| p.youngs_modulus).collect()), model.youngs_modulus),
            (median(recovered.iter().map(|p| p.yield_stress).collect()), model.yield_stress),
            (median(recovered.iter().map(|p| p.fracture_stress).collect()), model.fracture_stress()),
            (median(recovered.iter().map(|p| p.yield_strain).collect()), model.yield_strain),
            (median(recovered.iter().map(|p| p.fracture_strain).collect()), model.fracture_strain),
        ];
        for (got, want) in checks {
            assert_relative_eq!(got, want, max_relative = 0.03);
        }
    }

    #[test]
    fn extraction_rejects_non_monotone_displacements() {
        let model = table5_xy_model(0.0, 1);
        let mut record =
            generate_synthetic_record(&model, &SpecimenGeometry::NOMINAL, config(), 100, "bad").unwrap();
        record.samples[40].0 = record.samples[39].0 - 0.5; // gross reversal
        let err = extract_properties(&record, &ExtractOptions::default()).unwrap_err();
        assert!(matches!(err, CurveError::Stage { stage: "stress-strain", .. }));
    }

    #[test]
    fn batch_matches_single_extraction_in_order() {
        let records: Vec<_> = (0..6)
            .map(|seed| {
                generate_synthetic_record(
                    &table5_xy_model(0.3, seed),
                    &SpecimenGeometry::NOMINAL,
                    config(),
                    200,
                    format!("s{seed}"),
                )
                .unwrap()
            })
            .collect();
        let opts = ExtractOptions::default();
        let batch = extract_properties_batch(&records, &opts);
        for (record, result) in records.iter().zip(batch) {
            let single = extract_properties(record, &opts).unwrap();
            assert_eq!(result.unwrap().properties, single.properties);
        }
    }

    #[test]
    fn aggregate_of_identical_quintets_has_zero_std() {
        let p = CompressionProperties {
            youngs_modulus: 1743.5,
            yield_stress: 61.65,
            fracture_stress: 42.21,
            yield_strain: 0.038,
            fracture_strain: 0.076,
        };
        let stats = aggregate(&[p; 6]).unwrap();
        assert_eq!(stats.n, 6);
        assert_eq!(stats.youngs_modulus.mean, 1743.5);
        assert_eq!(stats.youngs_modulus.std_dev, 0.0);
    }

    #[test]
    fn aggregate_two_point_closed_form() {
        let mut a = CompressionProperties {
            youngs_modulus: 1740.0,
            yield_stress: 60.0,
            fracture_stress: 42.0,
            yield_strain: 0.038,
            fracture_strain: 0.076,
        };
        let mut b = a;
        a.youngs_modulus = 1740.0;
        b.youngs_modulus = 1747.0;
        let stats = aggregate(&[a, b]).unwrap();
        assert_relative_eq!(stats.youngs_modulus.mean, 1743.5);
        assert_relative_eq!(stats.youngs_modulus.std_dev, 4.9497, max_relative = 1e-4);
    }

    #[test]
    fn aggregate_rejects_empty_input() {
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn aggregate_mean_is_fixed_point() {
        let quintets: Vec<CompressionProperties> = (0..5)
            .map(|i| CompressionProperties {
                youngs_modulus: 1700.0 + i as f64 * 20.0,
                yield_stress: 60.0 + i as f64,
                fracture_stress: 40.0 + i as f64,
                yield_strain: 0.035 + i as f64 * 1e-3,
                fracture_strain: 0.07 + i as f64 * 1e-3,
            })
            .collect();
        let stats = aggregate(&quintets).unwrap();
        let mean_quintet = CompressionProperties {
            youngs_modulus: stats.youngs_modulus.mean,
            yield_stress: stats.yield_stress.mean,
            fracture_stress: stats.fracture_stress.mean,
            yield_strain: stats.yield_strain.mean,
            fracture_strain: stats.fracture_strain.mean,
        };
        let mut extended = quintets;
        extended.push(mean_quintet);
        let stats2 = aggregate(&extended).unwrap();
        assert_relative_eq!(stats2.youngs_modulus.mean, stats.youngs_modulus.mean, max_relative = 1e-12);
        assert_relative_eq!(stats2.fracture_strain.mean, stats.fracture_strain.mean, max_relative = 1e-12);
    }

    /// Piecewise force ramp matching one prototype table row: rise to the
    /// peak, gradual fall to the terminal sample.
    fn prototype_record(scale: f64) -> RawTestRecord {
        let peak = (2.896, 6532.0 * scale);
        let last = (4.481, 3166.0 * scale);
        let n_up = 60;
        let n_down = 40;
        let mut samples = Vec::new();
        for i in 0..n_up {
            let d = peak.0 * i as f64 / n_up as f64;
            samples.push((d, peak.1 * i as f64 / n_up as f64));
        }
        for i in 0..=n_down {
            let t = i as f64 / n_down as f64;
            samples.push((peak.0 + (last.0 - peak.0) * t, peak.1 + (last.1 - peak.1) * t));
        }
        RawTestRecord::new(samples, SpecimenGeometry::NOMINAL, config(), "proto").unwrap()
    }

    #[test]
    fn prototype_features_match_constructed_peak_and_terminal_sample() {
        let f = prototype_features(&prototype_record(1.0)).unwrap();
        assert_eq!(f.f_max, 6532.0);
        assert_eq!(f.dl_f_max, 2.896);
        assert_eq!(f.f_fracture, 3166.0);
        assert_eq!(f.dl_fracture, 4.481);
    }

    #[test]
    fn prototype_features_scale_linearly_in_force() {
        let base = prototype_features(&prototype_record(1.0)).unwrap();
        let doubled = prototype_features(&prototype_record(2.0)).unwrap();
        assert_eq!(doubled.f_max, 2.0 * base.f_max);
        assert_eq!(doubled.f_fracture, 2.0 * base.f_fracture);
        assert_eq!(doubled.dl_f_max, base.dl_f_max);
        assert_eq!(doubled.dl_fracture, base.dl_fracture);
    }

    #[test]
    fn prototype_features_monotone_ramp_falls_back_to_last_sample() {
        let samples: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 * 0.1, i as f64 * 100.0)).collect();
        let record = RawTestRecord::new(samples, SpecimenGeometry::NOMINAL, config(), "ramp").unwrap();
        let f = prototype_features(&record).unwrap();
        assert_eq!(f.f_max, 4900.0);
        assert_eq!(f.f_fracture, f.f_max);
        assert_eq!(f.dl_fracture, f.dl_f_max);
    }

    #[test]
    fn prototype_features_reject_short_records() {
        let samples: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, i as f64)).collect();
        let record = RawTestRecord {
            samples,
            geometry: SpecimenGeometry::NOMINAL,
            config: config(),
            label: "short".into(),
        };
        assert!(prototype_features(&record).is_err());
    }
}
