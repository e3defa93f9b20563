use csikit::io::{csif, csv, features, report, FormatError, Payload};
use csikit::pipeline::{process, Method, ProcessParams};
use csikit::synth::DatasetSpec;
use csikit::{Complex64, Error, Grid};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #[test]
    fn csif_round_trip(cells in prop::collection::vec((finite(), finite()), 1..64), cols in 1usize..8) {
        let rows = cells.len().div_ceil(cols);
        let mut data: Vec<Complex64> = cells.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        data.resize(rows * cols, Complex64::new(0.0, 0.0));
        let p = Payload::Complex(Grid::from_vec(rows, cols, data).unwrap());
        let bytes = csif::encode(&p);
        let back = csif::decode(&bytes).unwrap();
        prop_assert_eq!(csif::encode(&back), bytes);
    }

    #[test]
    fn csv_round_trip_is_bit_exact(vals in prop::collection::vec(finite(), 2..40)) {
        let g = Grid::from_vec(1, vals.len(), vals.clone()).unwrap();
        let text = csv::to_string(&Payload::Real(g));
        let Payload::Real(back) = csv::read(text.as_bytes()).unwrap() else { panic!("kind") };
        for (a, b) in back.as_slice().iter().zip(&vals) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn csif_to_csv_to_csif() {
    let data = DatasetSpec::demo(40, 30).generate().unwrap();
    let p = Payload::Complex(data.measured_csi.grid().clone());
    let bytes = csif::encode(&p);
    let via_csv = csv::read(csv::to_string(&csif::decode(&bytes).unwrap()).as_bytes()).unwrap();
    assert_eq!(csif::encode(&via_csv), bytes);
}

#[test]
fn synth_files_decode_to_generated_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let data = DatasetSpec::demo(25, 30).generate().unwrap();
    let (t, m) = data.write_csif(&dir.path().join("demo")).unwrap();
    assert!(t.ends_with("demo.true.csif") && m.ends_with("demo.meas.csif"));
    assert_eq!(csif::read(&t).unwrap(), Payload::Complex(data.true_csi.grid().clone()));
    assert_eq!(csif::read(&m).unwrap(), Payload::Complex(data.measured_csi.grid().clone()));
}

#[test]
fn file_errors_are_io_errors() {
    let err = csif::read(std::path::Path::new("/nonexistent/x.csif")).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    let err = csif::decode(b"CSIF").unwrap_err();
    assert_eq!(err, FormatError::Truncated { expected: 16, actual: 4 });
}

#[test]
fn features_of_processed_phase() {
    let dir = tempfile::tempdir().unwrap();
    let data = DatasetSpec::demo(30, 30).generate().unwrap();
    let out = process(&data.measured_csi, Method::Tsfr, &ProcessParams::default()).unwrap();
    let path = dir.path().join("phase.f64");
    let params = [("method", "tsfr".to_string()), ("sg_order", "2".to_string())];
    let side = features::export(&path, out.phase.grid(), features::Element::F64, &params).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 30 * 30 * 8);
    let again = dir.path().join("again.f64");
    features::export(&again, out.phase.grid(), features::Element::F64, &params).unwrap();
    assert_eq!(
        std::fs::read(features::sidecar_path(&path)).unwrap(),
        std::fs::read(features::sidecar_path(&again)).unwrap()
    );
    let (grid, read_side) = features::import(&path).unwrap();
    assert_eq!(&grid, out.phase.grid());
    assert_eq!(read_side, side);
}

#[test]
fn report_of_tsfr_run() {
    let data = DatasetSpec::demo(60, 30).generate().unwrap();
    let out = process(&data.measured_csi, Method::Tsfr, &ProcessParams::default()).unwrap();
    let r = report::Report::from_processed(&out);
    assert_eq!(r.get("method"), Some("tsfr"));
    assert_eq!(r.symbols.len(), 60);
    let t = out.tsfr.as_ref().unwrap();
    for (row, th) in r.symbols.iter().zip(&t.thresholds) {
        assert_eq!(row.d, th.d);
    }
    assert_eq!(report::Report::parse(&r.to_text()).unwrap(), r);
}
