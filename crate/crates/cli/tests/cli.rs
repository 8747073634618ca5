use std::process::{Command, Output};

fn dimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_examples() {
    let cases: [(&[&str], &str); 3] = [
        (&["count", "--lattice", "g1-cylinder", "--m", "1", "--n", "1", "--method", "brute"], "8"),
        (&["count", "--lattice", "quad", "--m", "2", "--n", "2", "--method", "fkt"], "2"),
        (&["count", "--lattice", "hexagon", "--a", "2", "--b", "2", "--c", "2", "--method", "closed"], "20"),
    ];
    for (args, expected) in cases {
        let o = dimer(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).trim(), expected);
    }
}

#[test]
fn large_count_prints_every_digit() {
    let o = dimer(&["count", "--lattice", "g1-cylinder", "--m", "6", "--n", "5", "--method", "product"]);
    let closed = dimer(&["count", "--lattice", "g1-cylinder", "--m", "6", "--n", "5", "--method", "closed"]);
    let text = stdout(&o);
    assert!(text.trim().chars().all(|c| c.is_ascii_digit()), "{text}");
    assert_eq!(text, stdout(&closed));
}

#[test]
fn verify_agrees_and_fault_is_caught() {
    for (m, n) in [("1", "1"), ("2", "1")] {
        let o = dimer(&["verify", "--lattice", "g2-cylinder", "--m", m, "--n", n]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let o = dimer(&["verify", "--lattice", "g1-cylinder", "--m", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with(" 8")).count(), 4);

    let o = dimer(&["verify", "--lattice", "g1-cylinder", "--m", "1", "--n", "1", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn bad_flags_exit_one_and_help_exits_zero() {
    assert_eq!(dimer(&["count", "--lattice", "quad", "--m", "2"]).status.code(), Some(1));
    assert_eq!(dimer(&["count", "--lattice", "nope", "--m", "2", "--n", "2"]).status.code(), Some(1));
    assert_eq!(dimer(&["count", "--lattice", "quad", "--m", "2", "--n", "2", "--method", "x"]).status.code(), Some(1));
    assert_eq!(dimer(&["count", "--lattice", "quad", "--m", "2", "--n", "2", "--method", "closed"]).status.code(), Some(1));
    assert_eq!(dimer(&["--help"]).status.code(), Some(0));
    assert_eq!(dimer(&["--version"]).status.code(), Some(0));
}

#[test]
fn entropy_lines_are_name_value_error() {
    let o = dimer(&["entropy", "--formula", "g1-cylinder", "--formula", "quad-lattice"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 3);
        for f in &fields[1..] {
            assert_eq!(f.split('.').nth(1).map(str::len), Some(10), "{line}");
        }
    }
    assert!(lines[0].starts_with("g1-cylinder 0.3344"));
    assert!(lines[1].starts_with("quad-lattice 0.5831"));
    assert_eq!(dimer(&["entropy", "--formula", "nope"]).status.code(), Some(1));
}

#[test]
fn tables() {
    let o = dimer(&["table", "--lattice", "g1-cylinder", "--m", "1..4", "--n", "1..3", "--method", "closed"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,count,entropy_finite"));
    assert_eq!(lines.count(), 12);

    let o = dimer(&["table", "--lattice", "quad", "--m", "4", "--n", "4"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split(',').nth(2), Some("36"));

    let o = dimer(&["table", "--lattice", "g2-cylinder", "--m", "2,4,8,16", "--n", "2,4,8,16", "--method", "closed"]);
    let diagonal: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0] == f[1]).then(|| f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(diagonal.len(), 4);
    assert!(diagonal.windows(2).all(|w| w[0] < w[1]), "{diagonal:?}");
    assert!(diagonal.iter().all(|&e| e < 0.3770));
}

#[test]
fn generated_files_count_the_same() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let quotient = dir.path().join("q.txt");
    let base = ["--lattice", "g2-cylinder", "--m", "2", "--n", "2"];
    let gen = |extra: &[&str], path: &std::path::Path| {
        let mut args = vec!["generate"];
        args.extend_from_slice(&base);
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--output", path.to_str().unwrap()]);
        assert!(dimer(&args).status.success());
    };
    gen(&[], &graph);
    gen(&["--quotient"], &quotient);
    let fkt = dimer(&["count", "--input", graph.to_str().unwrap(), "--method", "fkt"]);
    let product = dimer(&["count", "--input", quotient.to_str().unwrap(), "--method", "product"]);
    assert_eq!(stdout(&fkt).trim(), "324");
    assert_eq!(stdout(&product).trim(), "324");
    // a plain graph has no quotient
    let o = dimer(&["count", "--input", graph.to_str().unwrap(), "--method", "product"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["table", "--lattice", "g1-cylinder", "--m", "1..3", "--n", "1..2", "--method", "product"];
    assert_eq!(dimer(&args).stdout, dimer(&args).stdout);
    let args = ["generate", "--lattice", "g1-cylinder", "--m", "1", "--n", "2", "--quotient"];
    assert_eq!(dimer(&args).stdout, dimer(&args).stdout);
}
