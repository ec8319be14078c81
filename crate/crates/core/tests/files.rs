use nss_core::bench::Builtin;
use nss_core::dataio::{
    read_csv, read_libsvm, read_metadata, write_csv, write_libsvm, write_metadata, LabelColumn,
    Preprocessor, ScaleMode,
};
use nss_core::model_file::{ModelFile, TrainedModel};
use nss_core::{nss_fit, ErrorClass, NssError};

#[test]
fn datasets_survive_a_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let data = Builtin::GaussianPaper { n: 90 }.generate(3).unwrap();

    let csv = dir.path().join("g.csv");
    write_csv(&data, &csv).unwrap();
    assert_eq!(read_csv(&csv, &LabelColumn::Auto).unwrap(), data);

    let svm = dir.path().join("g.svm");
    write_libsvm(&data, &svm).unwrap();
    assert_eq!(read_libsvm(&svm, Some(data.dim())).unwrap(), data);

    let meta = dir.path().join("g.meta");
    let entries = vec![("generator".to_string(), "gaussian-paper".to_string())];
    write_metadata(&entries, &meta).unwrap();
    assert_eq!(read_metadata(&meta).unwrap(), entries);
}

#[test]
fn saved_model_loads_with_its_preprocessing() {
    let dir = tempfile::tempdir().unwrap();
    let data = Builtin::SubspacePaper { n: 240 }.generate(5).unwrap();
    let pre = Preprocessor::fit(data.samples(), Some(ScaleMode::Unit), None).unwrap();
    let model = nss_fit(&pre.apply_dataset(&data).unwrap(), 2).unwrap();
    let file = ModelFile::new(TrainedModel::Nss(model), pre, data.label_names().to_vec()).unwrap();
    let path = dir.path().join("m.model");
    file.save(&path).unwrap();
    let back = ModelFile::load(&path).unwrap();
    for x in data.samples().row_iter() {
        assert_eq!(file.predict(x).unwrap(), back.predict(x).unwrap());
    }
}

#[test]
fn missing_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let err = read_csv(dir.path().join("absent.csv"), &LabelColumn::Auto).unwrap_err();
    assert!(matches!(err, NssError::Io { .. }), "{err}");
    assert_eq!(err.class(), ErrorClass::Parse);
    assert!(err.to_string().contains("absent.csv"));
}
