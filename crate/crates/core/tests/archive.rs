use nlslab_core::archive::{read_snapshot, read_trajectory, write_snapshot, write_trajectory, ArchiveIndex};
use nlslab_core::data::Gaussian;
use nlslab_core::propagator::{evolve, SolverConfig};
use nlslab_core::{Field, Grid};

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new_2d(32, 7.5_f64).unwrap();
    let u = Gaussian::new(1.1, 0.8).with_velocity([0.3, -0.4]).with_chirp(0.2).sample(&g).unwrap();
    let path = dir.path().join("u.nlsf");
    write_snapshot(&path, &u).unwrap();
    let back: Field<f64> = read_snapshot(&path).unwrap();
    assert_eq!(back, u);
}

#[test]
fn trajectory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new_2d(64, 16.0_f64).unwrap();
    let u0 = Gaussian::new(1.0, 1.0).sample(&g).unwrap();
    let tr = evolve(&SolverConfig::new(&g, 1e-2, 0.2).with_stride(5), &u0).unwrap();
    write_trajectory(dir.path(), &tr).unwrap();
    let index: ArchiveIndex =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("index.json")).unwrap()).unwrap();
    assert_eq!(index.stride, 5);
    assert_eq!(index.times.len(), 5);
    assert!((index.dt - 1e-2).abs() < 1e-15);
    let back = read_trajectory::<f64>(dir.path()).unwrap();
    assert_eq!(back.fields(), tr.fields());
    assert_eq!(back.times(), tr.times());
}

#[test]
fn missing_snapshot_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new_2d(8, 1.0_f64).unwrap();
    let u = Field::zeros(&g);
    let tr = nlslab_core::Trajectory::from_snapshots(0.0, 0.5, vec![u.clone(), u]).unwrap();
    write_trajectory(dir.path(), &tr).unwrap();
    std::fs::remove_file(dir.path().join("snapshot_000001.nlsf")).unwrap();
    assert!(read_trajectory::<f64>(dir.path()).is_err());
}
