//! Golden-file check of the SVG renderer: the chart for a fixed synthetic
//! curve must match the committed reference byte for byte.

use presslab_core::curve::{generate_synthetic_record, to_stress_strain, SyntheticModel};
use presslab_core::model::{InfillPattern, PrintAxis, PrintConfig, SpecimenGeometry};
use presslab_core::report::{svg_line_chart, CurveSeries};

fn golden_series() -> CurveSeries {
    let model = SyntheticModel::from_properties(1743.5, 61.65, 0.038, 42.21, 0.076, 0.0, 5).unwrap();
    let record = generate_synthetic_record(
        &model,
        &SpecimenGeometry::NOMINAL,
        PrintConfig::new(PrintAxis::XY, InfillPattern::Concentric),
        120,
        "golden",
    )
    .unwrap();
    let curve = to_stress_strain(&record).unwrap();
    CurveSeries {
        label: "golden specimen".into(),
        x_label: "Strain [mm/mm]".into(),
        y_label: "Stress [MPa]".into(),
        points: curve.strains().iter().copied().zip(curve.stresses().iter().copied()).collect(),
    }
}

#[test]
fn svg_chart_matches_the_golden_file() {
    let rendered = svg_line_chart(&golden_series());
    let golden = include_str!("golden/stress_strain.svg");
    assert_eq!(rendered, golden, "SVG output drifted from the golden file");
}

#[test]
fn svg_chart_is_stable_across_renders() {
    let series = golden_series();
    assert_eq!(svg_line_chart(&series), svg_line_chart(&series));
}
