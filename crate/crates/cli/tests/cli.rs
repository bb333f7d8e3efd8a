use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use arrac_core::format::{read_array, write_array};
use arrac_core::qlang::{evaluate, parse, Catalog};

const M_TEXT: &str = "arrac v1 arity=2 count=4\n\
    0,0 -> str:\"a\"\n\
    0,1 -> str:\"b\"\n\
    1,0 -> str:\"c\"\n\
    1,1 -> str:\"d\"\n";

const T_TEXT: &str = "arrac v1 arity=1 count=3\n\
    0 -> tuple(int:1,str:\"x\",float:0.5)\n\
    1 -> tuple(int:2,str:\"y\",float:1.5)\n\
    4 -> tuple(int:3,str:\"z\",undef)\n";

fn arrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrac"))
        .args(args)
        .output()
        .expect("run arrac")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn catalog() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("M.arr"), M_TEXT).unwrap();
    fs::write(dir.path().join("T.arr"), T_TEXT).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn query_select_example() {
    let db = catalog();
    let out = arrac(&["query", "-c", s(db.path()), "select(M, val = \"b\")"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "arrac v1 arity=2 count=1\n0,1 -> str:\"b\"\n");
    assert!(stderr(&out).is_empty());
}

#[test]
fn query_reference_echoes_canonically() {
    let db = catalog();
    // Non-canonical spacing and order in the stored file.
    fs::write(
        db.path().join("M.arr"),
        "arrac v1 arity=2 count=2\n1,1 -> str:\"d\"\n0,0 -> str:\"a\"\n",
    )
    .unwrap();
    let out = arrac(&["query", "-c", s(db.path()), "M"]);
    assert_eq!(
        stdout(&out),
        "arrac v1 arity=2 count=2\n0,0 -> str:\"a\"\n1,1 -> str:\"d\"\n"
    );
}

#[test]
fn query_matches_library_byte_for_byte() {
    let db = catalog();
    let mut cat = Catalog::new();
    cat.insert("M", read_array(M_TEXT).unwrap().0).unwrap();
    cat.insert("T", read_array(T_TEXT).unwrap().0).unwrap();
    for q in [
        "cross(M, T)",
        "equijoin(M, T, on(0:0))",
        "transform(M, [permute(1,0), translate(0, 4)])",
        "reassemble(select(hpartition(T, {0}, {1,2}), val.0 >= 2))",
        "union(select(M, dim0 = 0), select(M, dim0 = 1))",
    ] {
        let out = arrac(&["query", "-c", s(db.path()), q]);
        assert_eq!(out.status.code(), Some(0), "{q}: {}", stderr(&out));
        let expected = write_array(&evaluate(&parse(q).unwrap(), &cat).unwrap(), None);
        assert_eq!(stdout(&out), expected, "{q}");
    }
}

#[test]
fn query_from_file_and_to_output() {
    let db = catalog();
    let qfile = db.path().join("q.aq");
    fs::write(&qfile, "project(M, {(0,0), (1,0)})\n").unwrap();
    let result = db.path().join("out.arr");
    let out = arrac(&["query", "-c", s(db.path()), "-f", s(&qfile), "-o", s(&result), "--format", "canonical"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    assert_eq!(
        fs::read_to_string(result).unwrap(),
        "arrac v1 arity=2 count=2\n0,0 -> str:\"a\"\n1,0 -> str:\"c\"\n"
    );
}

#[test]
fn exit_codes() {
    let db = catalog();
    let d = s(db.path());

    let parse_err = arrac(&["query", "-c", d, "cross(M,"]);
    assert_eq!(parse_err.status.code(), Some(3));
    assert!(stdout(&parse_err).is_empty());
    let msg = stderr(&parse_err);
    assert!(msg.contains("| cross(M,\n  |         ^"), "{msg}");

    let type_err = arrac(&["query", "-c", d, "union(M, T)"]);
    assert_eq!(type_err.status.code(), Some(4));
    assert!(stdout(&type_err).is_empty());

    let unbound = arrac(&["query", "-c", d, "cross(M, Nope)"]);
    assert_eq!(unbound.status.code(), Some(4));
    assert!(stderr(&unbound).contains("Nope"));

    fs::write(db.path().join("C.arr"), "arrac v1 arity=2 count=1\n0,0 -> str:\"z\"\n").unwrap();
    let runtime = arrac(&["query", "-c", d, "cross(T, union(M, C))"]);
    assert_eq!(runtime.status.code(), Some(5));
    assert!(stderr(&runtime).contains("union(M, C)"));
    assert!(stdout(&runtime).is_empty());

    fs::write(db.path().join("Bad.arr"), "arrac v1 arity=1 count=2\n0 -> int:1\n0 -> int:2\n").unwrap();
    let format = arrac(&["query", "-c", d, "Bad"]);
    assert_eq!(format.status.code(), Some(6));
    assert!(stderr(&format).contains("line 3"));

    let scheme = arrac(&["vpartition", "-c", d, "M", "--pred", "dim0 = 0"]);
    assert_eq!(scheme.status.code(), Some(7));

    let usage = arrac(&["query"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn load_and_save() {
    let db = catalog();
    let src = db.path().join("incoming.arr");
    fs::write(&src, "arrac v1 arity=1 count=2\n3 -> int:9\n1 -> undef\n").unwrap();
    let out = arrac(&["load", "-c", s(db.path()), s(&src), "--name", "V"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let saved = arrac(&["save", "-c", s(db.path()), "V"]);
    assert_eq!(stdout(&saved), "arrac v1 arity=1 count=2\n1 -> undef\n3 -> int:9\n");

    fs::write(&src, "arrac v1 arity=1 count=2\n0 -> int:1\n0 -> int:2\n").unwrap();
    let bad = arrac(&["load", "-c", s(db.path()), s(&src)]);
    assert_eq!(bad.status.code(), Some(6));
    assert!(stderr(&bad).contains("consisten"), "{}", stderr(&bad));
}

#[test]
fn vertical_partition_round_trip() {
    let db = catalog();
    let d = s(db.path());
    let out = arrac(&["vpartition", "-c", d, "M", "--pred", "dim0 = 0", "--pred", "dim0 != 0", "--shards", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest = stdout(&out).trim().to_string();
    assert!(db.path().join("M.frag0.arr").exists());
    assert!(db.path().join("M.frag1.arr").exists());
    let back = arrac(&["reassemble", &manifest]);
    assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
    assert_eq!(stdout(&back), M_TEXT);
}

#[test]
fn single_fragment_scheme() {
    let db = catalog();
    let out = arrac(&["vpartition", "-c", s(db.path()), "M", "--pred", "true"]);
    let manifest = fs::read_to_string(stdout(&out).trim()).unwrap();
    assert_eq!(manifest.lines().filter(|l| l.starts_with("fragment ")).count(), 1);
    assert!(!db.path().join("M.frag1.arr").exists());
}

#[test]
fn horizontal_partition_round_trip() {
    let db = catalog();
    let frag_dir = db.path().join("frags");
    let out = arrac(&[
        "hpartition", "-c", s(db.path()), "T", "--slice", "0,2", "--slice", "1", "--out-dir", s(&frag_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest = stdout(&out).trim().to_string();
    assert!(frag_dir.join("T.frag1.arr").exists());
    let back = arrac(&["reassemble", &manifest]);
    assert_eq!(stdout(&back), T_TEXT);

    let bad = arrac(&["hpartition", "-c", s(db.path()), "T", "--slice", "0", "--slice", "0,1,2"]);
    assert_eq!(bad.status.code(), Some(7));
}

#[test]
fn tampered_fragments() {
    let db = catalog();
    let d = s(db.path());
    let out = arrac(&["vpartition", "-c", d, "M", "--pred", "dim0 = 0", "--pred", "dim0 = 1"]);
    let manifest = stdout(&out).trim().to_string();

    // An edited value inside the right fragment cannot be detected.
    fs::write(
        db.path().join("M.frag1.arr"),
        "arrac v1 arity=2 count=2\n1,0 -> str:\"EDITED\"\n1,1 -> str:\"d\"\n",
    )
    .unwrap();
    let edited = arrac(&["reassemble", &manifest]);
    assert_eq!(edited.status.code(), Some(0));
    assert!(stdout(&edited).contains("EDITED"));

    // An overlapping entry with a different value is a consistency violation.
    fs::write(
        db.path().join("M.frag0.arr"),
        "arrac v1 arity=2 count=3\n0,0 -> str:\"a\"\n0,1 -> str:\"b\"\n1,1 -> str:\"other\"\n",
    )
    .unwrap();
    let overlap = arrac(&["reassemble", &manifest]);
    assert_eq!(overlap.status.code(), Some(5));
    assert!(stderr(&overlap).contains("(1,1)"), "{}", stderr(&overlap));

    // A misplaced entry that does not conflict is caught by the scheme check.
    fs::write(
        db.path().join("M.frag0.arr"),
        "arrac v1 arity=2 count=3\n0,0 -> str:\"a\"\n0,1 -> str:\"b\"\n5,5 -> str:\"stray\"\n",
    )
    .unwrap();
    let stray = arrac(&["reassemble", &manifest]);
    assert_eq!(stray.status.code(), Some(7));
    assert!(stdout(&stray).is_empty());

    fs::remove_file(db.path().join("M.frag1.arr")).unwrap();
    assert_eq!(arrac(&["reassemble", &manifest]).status.code(), Some(1));
}

#[test]
fn table_round_trip() {
    let db = catalog();
    let d = s(db.path());
    let csv = db.path().join("measurements.csv");
    fs::write(
        &csv,
        "*measurementID:int,time:float,detector,valueMatrix:matrix\n\
         11,0.5,d2,\"array{arity=2; 0,0 -> float:10.0; 0,1 -> float:10.5; 0,2 -> float:11.0; 1,0 -> float:11.5; 1,1 -> float:12.0; 1,2 -> float:12.5}\"\n\
         10,0.25,d1,\"array{arity=2; 0,0 -> float:5.0; 0,1 -> float:5.5; 0,2 -> float:6.0; 1,0 -> float:6.5; 1,1 -> float:7.0; 1,2 -> float:7.5}\"\n",
    )
    .unwrap();
    let out = arrac(&["encode-table", "-c", d, s(&csv), "--name", "R"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let stored = fs::read_to_string(db.path().join("R.arr")).unwrap();
    assert!(stored.contains("label dim=1 0=\"measurementID\" 1=\"time\" 2=\"detector\" 3=\"valueMatrix\""), "{stored}");

    // Row coordinates are the keys; cell (10, 3) holds the nested matrix.
    let cell = arrac(&["query", "-c", d, "project(R, {(10,3)})"]);
    assert!(stdout(&cell).contains("10,3 -> array{arity=2; 0,0 -> float:5.0;"), "{}", stdout(&cell));

    let back = arrac(&["decode-table", "-c", d, "R"]);
    assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
    let text = stdout(&back);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("*measurementID:int,time:float,detector:str,valueMatrix:matrix"));
    assert!(lines.next().unwrap().starts_with("10,0.25,d1,\"array{arity=2; 0,0 -> float:5.0;"));
    assert!(lines.next().unwrap().starts_with("11,0.5,d2,"));

    fs::write(&csv, "*id:int,x\n1,a\n1,b\n").unwrap();
    let dup = arrac(&["encode-table", "-c", d, s(&csv), "--name", "Dup"]);
    assert_eq!(dup.status.code(), Some(7));
}
