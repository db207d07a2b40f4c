use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::sync::Arc;

use pmcf_core::config::Config;
use pmcf_core::fe::{interpolate, read_function, write_function, P2Space};
use pmcf_core::geometry::{build_mesh, read_mesh, write_mesh, DomainGeometry};
use pmcf_core::operators::RegParams;
use pmcf_core::oracle::{radial_regularized_solve, RadialProfile};
use pmcf_core::solver::IterationMode;
use pmcf_core::Error;

#[test]
fn mesh_and_function_survive_a_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let domain = DomainGeometry::ellipse(1.0, 0.6).unwrap();
    let mesh = build_mesh(&domain, 0.2).unwrap();
    let mpath = dir.path().join("ellipse.mesh");
    write_mesh(&mesh, BufWriter::new(File::create(&mpath).unwrap())).unwrap();
    let back = read_mesh(BufReader::new(File::open(&mpath).unwrap()), domain).unwrap();
    assert_eq!(back.vertices(), mesh.vertices());
    assert_eq!(back.triangles(), mesh.triangles());
    assert_eq!(back.boundary_flags(), mesh.boundary_flags());

    let space = P2Space::new(Arc::new(back));
    let f = interpolate(&space, |p| (1.0 - p[0] * p[0] - p[1] * p[1] / 0.36).sin());
    let fpath = dir.path().join("f.txt");
    write_function(&f, BufWriter::new(File::create(&fpath).unwrap())).unwrap();
    let g = read_function(BufReader::new(File::open(&fpath).unwrap()), &space).unwrap();
    assert_eq!(f.coefficients(), g.coefficients());

    // a dump never loads onto a different mesh
    let other = P2Space::new(Arc::new(build_mesh(&DomainGeometry::disk(1.0).unwrap(), 0.2).unwrap()));
    let err = read_function(BufReader::new(File::open(&fpath).unwrap()), &other).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }));
}

#[test]
fn truncated_function_dump_is_rejected() {
    let space = P2Space::new(Arc::new(build_mesh(&DomainGeometry::disk(1.0).unwrap(), 0.4).unwrap()));
    let mut buf = Vec::new();
    write_function(&interpolate(&space, |p| p[0]), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
    assert!(read_function(cut.as_bytes(), &space).is_err());
}

#[test]
fn oracle_csv_round_trip_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let rp = RegParams::new(0.3, 2.0).unwrap();
    let prof = radial_regularized_solve(&rp, 1.0, 64, 1e-9).unwrap();
    let path = dir.path().join("v.csv");
    prof.write_csv(BufWriter::new(File::create(&path).unwrap())).unwrap();
    let rows = RadialProfile::read_csv(File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), prof.radii().len());
    for ((r, v), (r0, v0)) in rows.iter().zip(prof.radii().iter().zip(prof.values())) {
        assert_eq!((r, v), (r0, v0));
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(
        &path,
        "# frozen run on an ellipse\ndomain = ellipse\na = 1.5\nb = 0.75\nmode = frozen\nschedule = 1, 0.5\n",
    )
    .unwrap();
    let mut cfg = Config::from_file(&path).unwrap();
    cfg.set_assignment("tol=1e-9").unwrap();
    assert_eq!(cfg.solve_options().unwrap().mode, IterationMode::Frozen);
    assert_eq!(cfg.solve_options().unwrap().tol, 1e-9);
    assert_eq!(cfg.schedule().unwrap(), vec![1.0, 0.5]);
    assert_eq!(cfg.domain().unwrap().diameter(), 3.0);
    assert!(cfg.set_assignment("bogus=1").is_err());
    assert!(cfg.set_assignment("no equals sign").is_err());
    assert!(Config::from_file(&dir.path().join("missing.cfg")).is_err());
}

#[test]
fn config_rejects_out_of_range_coupling() {
    let cfg = Config::parse("delta = 2.0").unwrap();
    assert!(cfg.coupling().is_err());
    let cfg = Config::parse("mu = 4").unwrap();
    assert!(cfg.coupling().is_err());
}
