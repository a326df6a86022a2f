//! Builds, verifies and saves convexity certificates.
//!
//! A certificate assigns each reflecting cut a positive semidefinite
//! matrix; verification checks the sum rule over every pair of items.

use nalgebra::DMatrix;
use psi_monotones::graph::{build_cycle, build_hypercube, cartesian_product};
use psi_monotones::io::{write_json, CertificateFile};
use psi_monotones::reflect::{
    certificate_for_cycle, certificate_for_product, enumerate_reflecting_cuts, identity_certificate,
    vertex_certificate, verify_certificate, CertificateItems,
};
use psi_monotones::{ConvexityCertificate, PsiGraph};

fn show(name: &str, g: &PsiGraph, cert: &ConvexityCertificate) -> psi_monotones::Result<()> {
    let r = verify_certificate(g, cert)?;
    println!(
        "{name:<22} cuts {:>2}  passed {:<5}  min eigenvalue {:.3}  worst residual {:.1e}",
        cert.cuts.len(),
        r.passed,
        r.min_psd_margin,
        r.worst_sum_residual
    );
    Ok(())
}

fn main() -> psi_monotones::Result<()> {
    for n in 1..=4 {
        let (g, cert) = certificate_for_cycle(n, 0)?;
        show(&format!("C{n} label 0"), &g, &cert)?;
    }

    // E2 x E1 from a cycle certificate and the vertex certificate of K2
    let k2 = build_hypercube(1)?;
    let k2_cert = identity_certificate(&k2, 0, &enumerate_reflecting_cuts(&k2)?);
    let vk2 = vertex_certificate(&k2, &k2_cert)?;
    let (e2, e2_cert) = certificate_for_cycle(2, 0)?;
    let e3 = cartesian_product(&e2, &k2);
    let lifted = certificate_for_product(&e2, &e2_cert, &k2, Some(&vk2))?;
    show("E2xE1 lifted", &e3, &lifted)?;

    // the symmetric E3 solution: every cut gets [[1, 1/2], [1/2, 1]]
    let cube = build_hypercube(3)?;
    let mut sym = ConvexityCertificate::new(CertificateItems::Edges(0));
    for cut in enumerate_reflecting_cuts(&cube)? {
        let labels = cut.cut_edges().iter().map(|&e| cube.edge(e).label);
        if labels.clone().all(|l| l != 0) {
            sym.add(cut, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        }
    }
    show("E3 symmetric", &cube, &sym)?;

    // the identity guess fails on E3, which is why the lifted form exists
    let guess = identity_certificate(&cube, 0, &enumerate_reflecting_cuts(&cube)?);
    show("E3 identity guess", &cube, &guess)?;

    let c3 = build_cycle(3, false)?;
    let (_, c3_cert) = certificate_for_cycle(3, 1)?;
    let out = std::env::temp_dir().join("c3_label1_certificate.json");
    write_json(&out, &CertificateFile::from_certificate(&c3_cert, Some(&c3)))?;
    println!("wrote {}; check it with `psimono certificate verify`", out.display());
    Ok(())
}
