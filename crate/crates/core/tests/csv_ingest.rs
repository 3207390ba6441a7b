use std::io::Write;

use inlm_core::nn::{load_csv_dataset, CsvSpec, SatLin, TestScaling};
use inlm_core::Error;

fn write(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn spec(n_train: usize, n_test: usize) -> CsvSpec {
    CsvSpec {
        target_column: 0,
        excluded_columns: vec![2],
        n_train,
        n_test,
        has_header: None,
        scaling: TestScaling::TrainFactor,
    }
}

#[test]
fn toy_file_round_trips() {
    let f = write("y,s1,s2,s3\n1.5,3,99,4\n2.5,0,99,1\n-1,6,99,8\n");
    let prob = load_csv_dataset(f.path(), &spec(2, 1), SatLin::default()).unwrap();
    assert_eq!(prob.input_dim(), 2);
    // largest raw train norm is |(3, 4)| = 5
    assert_eq!(prob.scale_factor(), 5.0);
    assert_eq!(prob.input(0), &[0.6, 0.8]);
    assert_eq!(prob.input(1), &[0.0, 0.2]);
    assert_eq!(prob.input(2), &[1.2, 1.6]);
    assert_eq!(prob.target(2), -1.0);
    for i in 0..3 {
        assert!(prob.input(i).iter().all(|v| (v * 5.0 - 99.0).abs() > 1e-9));
    }
}

#[test]
fn own_factor_scales_test_slice_separately() {
    let f = write("1.5,3,99,4\n2.5,0,99,1\n-1,6,99,8\n");
    let s = CsvSpec {
        scaling: TestScaling::OwnFactor,
        ..spec(2, 1)
    };
    let prob = load_csv_dataset(f.path(), &s, SatLin::default()).unwrap();
    assert!((prob.input(2)[0] - 0.6).abs() < 1e-15 && (prob.input(2)[1] - 0.8).abs() < 1e-15);
}

#[test]
fn malformed_row_reports_its_index() {
    let f = write("y,a,b\n1,2,3\n1,x,3\n");
    let err = load_csv_dataset(f.path(), &spec(2, 0), SatLin::default()).unwrap_err();
    match err {
        Error::Csv { row, .. } => assert_eq!(row, 3),
        other => panic!("unexpected {other:?}"),
    }
    let f = write("1,2,3\n1,2\n");
    let err = load_csv_dataset(f.path(), &spec(2, 0), SatLin::default()).unwrap_err();
    assert!(matches!(err, Error::Csv { row: 2, .. }));
}

#[test]
fn missing_columns_and_short_files_are_errors() {
    let f = write("1,2,3\n4,5,6\n");
    let bad_target = CsvSpec {
        target_column: 7,
        ..spec(1, 1)
    };
    assert!(load_csv_dataset(f.path(), &bad_target, SatLin::default()).is_err());
    assert!(load_csv_dataset(f.path(), &spec(2, 1), SatLin::default()).is_err());
    assert!(load_csv_dataset(std::path::Path::new("/nonexistent.csv"), &spec(1, 0), SatLin::default()).is_err());
}
