use std::path::Path;

use ame_phase::crt::{compose_matrices, split_matrix};
use ame_phase::phasecore::format;
use sha2::{Digest, Sha256};

const PINNED: [(&str, &str); 3] = [
    (
        "ame17_f73.txt",
        "266bed7699083045d107f6b4cfd8ea552beba55b3764ba4ede7e6ba00a35e20f",
    ),
    (
        "ame17_f137.txt",
        "0eb2a0aa7490c8338e3ad75a1fa35097ef630e62263f4c61889819bb50a01c1b",
    ),
    (
        "ame17_z10001.txt",
        "0525126eaa7576bd4dd3bf35e33d718bac4ac5b4c86c616b3fd289685a740286",
    ),
];

fn path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn fixture_checksums_are_pinned() {
    for (name, sum) in PINNED {
        let bytes = std::fs::read(path(name)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), sum, "{name}");
    }
}

#[test]
fn fixtures_are_canonical_and_consistent() {
    for (name, _) in PINNED {
        let text = std::fs::read_to_string(path(name)).unwrap();
        let p = format::parse(&text).unwrap();
        assert_eq!(p.n(), 17);
        assert_eq!(format::body(&p), text, "{name}");
    }
    let f73 = format::read(path("ame17_f73.txt")).unwrap();
    let f137 = format::read(path("ame17_f137.txt")).unwrap();
    let z = format::read(path("ame17_z10001.txt")).unwrap();
    assert_eq!(compose_matrices(&[f73.clone(), f137.clone()]).unwrap(), z);
    assert_eq!(split_matrix(&z).unwrap(), vec![f73.clone(), f137.clone()]);
    // Independent check of a few entries: z = a (mod 73), z = b (mod 137).
    for i in 0..17 {
        for j in 0..17 {
            let v = z.get(i, j);
            assert!(v < 10001);
            assert_eq!(v % 73, f73.get(i, j));
            assert_eq!(v % 137, f137.get(i, j));
        }
    }
}
