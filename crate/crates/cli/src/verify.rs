use std::collections::BTreeMap;
use std::path::Path;

use cantor_cdh::certificate::{Certificate, Failure};
use cantor_cdh::conemap::{validate, PiecewiseConeHomeo};
use cantor_cdh::document::{CertificateReport, Dump, Synthesizer};
use cantor_cdh::error::Error;
use cantor_cdh::krcover::{combination_map, verify_kr_cover, KRCover};
use cantor_cdh::point::EpPoint;
use cantor_cdh::word::Word;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::read;

pub fn run(file: &Path, depth: usize, samples: usize, seed: u64) -> Result<u8, Error> {
    let text = read(file)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    let report = if value.get("pieces_U").is_some() {
        let c: KRCover = serde_json::from_value(value).map_err(|e| Error::MalformedInput(e.to_string()))?;
        CertificateReport::new("verify", None, None, cover(&c, depth, samples, seed))
    } else {
        let d = Dump::parse(&text)?;
        let n = d.run.stages.len() - 1;
        CertificateReport::new("verify", Some(d.instance.mode()), Some(n), dump(&d, depth, samples, seed)?)
    };
    println!("{}", report.to_json());
    Ok(if report.passed { 0 } else { 1 })
}

fn dump(d: &Dump, depth: usize, samples: usize, seed: u64) -> Result<Certificate, Error> {
    let s = d.synthesizer()?;
    let mut cert = s.certify(samples);
    let n = d.run.stages.len() - 1;
    let mut fresh = Synthesizer::new(&d.instance)?;
    fresh.drive_to(n)?;
    let replay = match fresh.run().stages.iter().zip(&d.run.stages).find(|(a, b)| a != b) {
        None => Ok(()),
        Some((a, _)) => Err(Failure::new("replay", format!("stage {} differs from a fresh run", a.n))),
    };
    cert.record("replay", replay);
    let state = d.run.current();
    cert.record("oracle", oracle(&state.map, depth));
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut tails = Ok(());
    for _ in 0..samples {
        let x = random_point(&mut r);
        // absorbed points may change class
        if state.in_g0(&x) {
            continue;
        }
        if let Err(f) = preserves_tail(&state.map, &x) {
            tails = Err(f);
            break;
        }
    }
    cert.record("tail-preservation", tails);
    Ok(cert)
}

fn cover(c: &KRCover, depth: usize, samples: usize, seed: u64) -> Certificate {
    let mut cert = verify_kr_cover(c, depth);
    if !cert.passed() {
        return cert;
    }
    let map = match combination_map(c, &BTreeMap::new()) {
        Ok(m) => m,
        Err(e) => {
            cert.record("oracle", Err(Failure::new("oracle", e.to_string())));
            return cert;
        }
    };
    cert.record("oracle", oracle(&map, depth));
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut tails = Ok(());
    for _ in 0..samples {
        let x = random_point(&mut r);
        if c.a.contains(&x) {
            continue;
        }
        if let Err(f) = preserves_tail(&map, &x) {
            tails = Err(f);
            break;
        }
    }
    cert.record("tail-preservation", tails);
    cert
}

/// Structural checks of the map, and its source cells against the atoms of depth `depth`.
fn oracle(map: &PiecewiseConeHomeo, depth: usize) -> Result<(), Failure> {
    if let Some(f) = validate(map, depth).first_failure() {
        return Err(Failure::new("oracle", format!("{} ({})", f.clause, f.witness.clone().unwrap_or_default())));
    }
    for atom in Word::all_of_length(depth.min(16)) {
        let hits = map.cells().filter(|c| c.source().is_prefix_of(&atom) || atom.is_prefix_of(c.source())).count();
        if hits == 0 {
            return Err(Failure::new("oracle", format!("atom [{atom}] meets no cell")));
        }
    }
    Ok(())
}

fn preserves_tail(map: &PiecewiseConeHomeo, x: &EpPoint) -> Result<(), Failure> {
    let y = map.apply(x).map_err(|e| Failure::new("tail-preservation", e.to_string()))?;
    if y.tail_equiv(x) {
        Ok(())
    } else {
        Err(Failure::new("tail-preservation", format!("h({x}) = {y}")))
    }
}

fn random_point<R: Rng>(r: &mut R) -> EpPoint {
    let (m, n) = (r.random_range(0..=10), r.random_range(1..=6));
    let mut word = |n: usize| Word::from_digits((0..n).map(|_| r.random_range(0..2u8)).collect()).expect("binary digits");
    let (u, v) = (word(m), word(n));
    EpPoint::canonicalize(u, v).expect("nonempty period")
}
