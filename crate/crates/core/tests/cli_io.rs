use boltzmann_core::cli_io::*;
use boltzmann_core::*;

fn run_cfg(cfg: &RunConfig) -> (Outcome, String) {
    let mut buf = Vec::new();
    let o = run(cfg, &mut buf).unwrap();
    (o, String::from_utf8(buf).unwrap())
}

fn orbit_cfg(d: f64, e: f64, steps: usize) -> RunConfig {
    let mut cfg = RunConfig::new(Command::Orbit);
    cfg.d = Some(d);
    cfg.e = Some(e);
    cfg.n_steps = Some(steps);
    cfg
}

fn table(s: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn orbit_csv_has_conserved_columns() {
    let (o, s) = run_cfg(&orbit_cfg(1.5, -0.2, 1000));
    assert_eq!(o, Outcome::Ok);
    let (header, rows) = table(&s);
    assert_eq!(header, ORBIT_COLUMNS);
    assert_eq!(rows.len(), 1001);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        assert!(
            num(&row[5]).abs() < 1e-8 && num(&row[6]).abs() < 1e-8,
            "step {k}: {row:?}"
        );
        assert_eq!(row[8], "0");
    }
}

#[test]
fn reference_orbit_closes_after_three_steps() {
    let (_, s) = run_cfg(&orbit_cfg(1.75, -5.0 / 24.0, 6));
    let (_, rows) = table(&s);
    let point = |k: usize| ConfigPoint::new(num(&rows[k][1]), num(&rows[k][2]), num(&rows[k][3]));
    assert!(point(3).distance(&point(0)) < 1e-7);
    assert!(point(6).distance(&point(0)) < 1e-7);
    assert!(point(1).distance(&point(0)) > 1e-3);
}

#[test]
fn bipartite_orbit_alternates_components() {
    let (_, s) = run_cfg(&orbit_cfg(2.5, -0.1, 8));
    let (_, rows) = table(&s);
    let eps: Vec<&str> = rows.iter().map(|r| r[8].as_str()).collect();
    for w in eps.windows(2) {
        assert_ne!(w[0], w[1]);
    }
}

#[test]
fn physical_svg_has_one_arc_per_step() {
    let mut cfg = orbit_cfg(1.75, -5.0 / 24.0, 3);
    cfg.format = Format::Svg;
    let (_, s) = run_cfg(&cfg);
    let doc = roxmltree::Document::parse(&s).unwrap();
    let class = |name: &str| {
        doc.descendants()
            .filter(|n| n.attribute("class") == Some(name))
            .collect::<Vec<_>>()
    };
    assert_eq!(class("arc").len(), 3);
    assert_eq!(class("wall").len(), 1);
    assert_eq!(class("centre").len(), 1);
    assert_eq!(class("collision").len(), 4);
    // the polygon closes: first and last collision circles coincide
    let dots = class("collision");
    let at = |n: &roxmltree::Node| {
        (
            n.attribute("cx").unwrap().to_owned(),
            n.attribute("cy").unwrap().to_owned(),
        )
    };
    assert_eq!(at(&dots[0]), at(&dots[3]));
    let arcs = class("arc");
    let first = arcs[0].attribute("d").unwrap();
    let last = arcs[2].attribute("d").unwrap();
    let start = first.split(" L").next().unwrap().trim_start_matches('M');
    let end = last.rsplit(" L").next().unwrap();
    assert_eq!(start, end);
}

#[test]
fn level_set_svg_component_structure() {
    for (d, e, n_comp) in [(1.5, -0.2, 1), (2.5, -0.1, 2)] {
        let mut cfg = orbit_cfg(d, e, 6);
        cfg.format = Format::Svg;
        cfg.view = View::LevelSet;
        let (_, s) = run_cfg(&cfg);
        let doc = roxmltree::Document::parse(&s).unwrap();
        let comps = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("component"))
            .count();
        assert_eq!(comps, n_comp, "({d}, {e})");
        let eps: Vec<&str> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("iterate"))
            .map(|n| n.attribute("data-eps").unwrap())
            .collect();
        assert_eq!(eps.len(), 7);
        if n_comp == 2 {
            assert!(eps.windows(2).all(|w| w[0] != w[1]), "{eps:?}");
        } else {
            assert!(eps.iter().all(|&v| v == "0"));
        }
    }
}

#[test]
fn class_map_is_well_formed() {
    let mut cfg = RunConfig::new(Command::Render);
    cfg.format = Format::Svg;
    cfg.grid = Some(Grid::parse("-4:4:-2:2:12").unwrap());
    let (_, s) = run_cfg(&cfg);
    let doc = roxmltree::Document::parse(&s).unwrap();
    let classes: Vec<&str> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("cell"))
        .map(|n| n.attribute("data-class").unwrap())
        .collect();
    assert_eq!(classes.len(), 144);
    for want in ["I", "IIplus", "IIminus", "Empty"] {
        assert!(classes.contains(&want), "{want} missing");
    }
}

#[test]
fn outputs_are_deterministic() {
    let mut cfgs = vec![orbit_cfg(1.5, -0.2, 50)];
    let mut rot = RunConfig::new(Command::Rotation);
    rot.grid = Some(Grid::parse("-3:3:-0.3:1.5:4").unwrap());
    rot.n_steps = Some(2000);
    cfgs.push(rot);
    let mut scan = RunConfig::new(Command::PeriodScan);
    scan.e = Some(-5.0 / 24.0);
    scan.p_list = vec![3, 4];
    cfgs.push(scan);
    for cfg in &cfgs {
        assert_eq!(run_cfg(cfg).1, run_cfg(cfg).1, "{:?}", cfg.command);
    }
    let mut other = orbit_cfg(1.5, -0.2, 50);
    other.seed = 2;
    assert_ne!(run_cfg(&other).1, run_cfg(&cfgs[0]).1);
}

#[test]
fn rotation_grid_rows_and_degenerate_cells() {
    let mut cfg = RunConfig::new(Command::Rotation);
    cfg.grid = Some(Grid::parse("-4:4:-0.5:1.5:5").unwrap());
    let (_, s) = run_cfg(&cfg);
    let (header, rows) = table(&s);
    assert_eq!(
        header,
        ["D", "E", "class", "alpha", "alpha_empirical", "difference"]
    );
    assert_eq!(rows.len(), 25);
    let mut valid = 0;
    for r in &rows {
        if r[3].is_empty() {
            assert!(r[5].is_empty());
            continue;
        }
        valid += 1;
        assert!(num(&r[5]) < 1e-6, "{r:?}");
    }
    assert!(valid > 5);
}

#[test]
fn period_scan_lists_reference_root() {
    let mut cfg = RunConfig::new(Command::PeriodScan);
    cfg.e = Some(-5.0 / 24.0);
    cfg.grid = Some(Grid::parse("0:2:-1:1:2").unwrap());
    let (_, s) = run_cfg(&cfg);
    let (_, rows) = table(&s);
    assert!(rows.iter().any(|r| (num(&r[2]) - 1.75).abs() < 1e-8), "{s}");
    assert!(rows.iter().all(|r| num(&r[3]).abs() < 1e-6));
    cfg.p_list = vec![2];
    assert_eq!(table(&run_cfg(&cfg).1).1.len(), 0);
}

#[test]
fn classify_json_reports_derived_parameters() {
    let mut cfg = RunConfig::new(Command::Classify);
    cfg.d = Some(1.75);
    cfg.e = Some(-5.0 / 24.0);
    cfg.format = Format::Json;
    let (_, s) = run_cfg(&cfg);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["class"], "I");
    assert!((v["k2"].as_f64().unwrap() + 5.0 / 27.0).abs() < 1e-15);
    assert!((v["alpha"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    cfg.d = Some(2.02);
    cfg.e = Some(-0.6);
    let (_, s) = run_cfg(&cfg);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["class"], "Empty");
    assert!(v["alpha"].is_null());
}

#[test]
fn selftest_outcomes() {
    let mut cfg = RunConfig::new(Command::Selftest);
    let (o, s) = run_cfg(&cfg);
    assert_eq!(o, Outcome::Ok, "{s}");
    assert_eq!(o.exit_code(), 0);
    cfg.force_fail = true;
    let (o, s) = run_cfg(&cfg);
    assert!(matches!(o, Outcome::CheckFailed(_)));
    assert_eq!(o.exit_code(), 1);
    assert!(s.contains("forced") && s.contains("FAIL"));
}

#[test]
fn usage_and_numeric_errors() {
    let mut cfg = orbit_cfg(1.0, -0.5, 6);
    let err = run(&cfg, &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Numeric(_)));
    assert_eq!(err.exit_code(), 2);
    cfg.d = None;
    assert!(matches!(
        run(&cfg, &mut Vec::new()),
        Err(CliError::Usage(_))
    ));
    assert!(Grid::parse("a:b:c:d:e").is_err());
}

#[test]
fn aborted_orbit_is_a_failed_check_with_partial_rows() {
    // E > 0 makes near-parabolic conics, whose wall abscissa is huge
    let p = derive_params(0.3, 0.7);
    let c0 = start_point(&p, 1).unwrap();
    let opts = IterateOptions {
        max_abs_x: 1.0,
        ..IterateOptions::default()
    };
    if let Err(Error::OrbitAbort { partial, .. }) = iterate_orbit(c0, &p, 200, &opts) {
        let rows = orbit_rows(&partial);
        assert_eq!(rows.len(), partial.points.len());
        let mut buf = Vec::new();
        write_orbit_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().lines().count(),
            rows.len() + 1
        );
    } else {
        panic!("expected an abort");
    }
}
