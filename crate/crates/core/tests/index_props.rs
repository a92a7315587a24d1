use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use depminer_core::frontend::Registry;
use depminer_core::index::{build_index, IndexError, TokenIndex};
use depminer_core::scope::AnalysisScope;
use depminer_testkit::oracle::{index_tuples, Oracle};
use depminer_testkit::{fixture, fixtures};

fn sources(root: &Path) -> Vec<(String, Vec<u8>)> {
    walkdir_files(root)
        .into_iter()
        .map(|p| {
            let rel = p
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .replace('\\', "/");
            (rel, std::fs::read(&p).unwrap())
        })
        .collect()
}

fn walkdir_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walkdir_files(&path));
        } else {
            out.push(path);
        }
    }
    out
}

fn fixture_index(name: &str) -> TokenIndex {
    build_index(&sources(&fixture(name)), &Registry::standard()).0
}

#[test]
fn index_equals_linear_scan_on_every_fixture() {
    let registry = Registry::standard();
    for name in fixtures() {
        let expected =
            Oracle::load(&fixture(name), &registry, AnalysisScope::default()).index_entries();
        let got = index_tuples(&fixture_index(name));
        assert!(!expected.is_empty());
        assert_eq!(got, expected, "{name}");
    }
}

#[test]
fn file_order_does_not_matter() {
    let registry = Registry::standard();
    let mut rng = StdRng::seed_from_u64(7);
    for name in fixtures() {
        let mut files = sources(&fixture(name));
        files.sort();
        let reference = build_index(&files, &registry).0;
        for _ in 0..5 {
            files.shuffle(&mut rng);
            let shuffled = build_index(&files, &registry).0;
            assert_eq!(shuffled, reference, "{name}");
            assert_eq!(shuffled.serialize(), reference.serialize(), "{name}");
        }
    }
}

#[test]
fn serialization_round_trips_byte_for_byte() {
    for name in fixtures() {
        let bytes = fixture_index(name).serialize();
        let back = TokenIndex::deserialize(&bytes).unwrap();
        assert_eq!(back.serialize(), bytes, "{name}");
    }
}

#[test]
fn empty_index_is_sixteen_bytes() {
    let bytes = TokenIndex::default().serialize();
    assert_eq!(bytes.len(), 16);
    assert_eq!(&bytes[..4], b"DMIX");
    assert_eq!(
        TokenIndex::deserialize(&bytes).unwrap(),
        TokenIndex::default()
    );
}

#[test]
fn corrupted_header_is_not_an_index() {
    for name in fixtures() {
        let mut bytes = fixture_index(name).serialize();
        bytes[..4].copy_from_slice(b"XXXX");
        assert_eq!(
            TokenIndex::deserialize(&bytes),
            Err(IndexError::NotAnIndex),
            "{name}"
        );
        bytes[..4].copy_from_slice(b"DMIX");
        bytes[4] = 9;
        assert_eq!(
            TokenIndex::deserialize(&bytes),
            Err(IndexError::VersionMismatch { found: 9 }),
            "{name}"
        );
    }
    assert_eq!(TokenIndex::deserialize(b"DM"), Err(IndexError::NotAnIndex));
}

#[test]
fn truncated_payload_is_corrupt() {
    for name in fixtures() {
        let bytes = fixture_index(name).serialize();
        for cut in 8..bytes.len() {
            match TokenIndex::deserialize(&bytes[..cut]) {
                Err(IndexError::Corrupt(_)) => {}
                other => panic!("{name}: cut at {cut} gave {other:?}"),
            }
        }
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(
            TokenIndex::deserialize(&longer),
            Err(IndexError::Corrupt(_))
        ));
    }
}
