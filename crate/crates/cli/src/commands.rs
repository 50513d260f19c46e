use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use serde_json::{json, Value};
use zigzag::circuits::{
    anharmonicity, charge_dispersion, level_curves, wkb_exponent_fit, CircuitKind, DispersionProbe,
    DispersionValue,
};
use zigzag::disorder::{dispersion_vs_g, DisorderMode, DisorderSpec};
use zigzag::lattice::{bands_extended, bloch_zz_nn, build_ssh_chain, build_zigzag_chain, SSHParams, SiteLabel};
use zigzag::lattice::{Sublattice, ZigZagParams};
use zigzag::numerics::{eig_hermitian, eigvals_hermitian};
use zigzag::spectral::{
    central_doublet, chiral_pairing_defect, diagonalize_chain, edge_decay_fit, edge_profile, ipr,
    ipr_boundary, phase_diagram_sweep, run_pool, select_state, PolarizedState, StateRule,
};
use zigzag::topology::{band_ratio_path, phase_boundary, winding_contour, winding_number, BulkBand, CellConvention};
use zigzag::Error;

use crate::output::{gnuplot_stub, linspace, parse_range, real, Csv, Manifest, Outputs};
use crate::{
    BandArgs, Cell, ChainArgs, CircuitCommand, CircuitCommon, Cli, Command, DisorderArgs, Failure, Mode, Panel,
    PhaseArgs, Probe, Rule, SshArgs, WindingArgs,
};

type Outcome = Result<(), Failure>;

struct Run<'a> {
    cli: &'a Cli,
    out: Outputs,
    manifest: Manifest,
}

impl Run<'_> {
    fn csv(&mut self, suffix: &str, table: &Csv, header: &[&str], xlabel: &str, log_y: bool) -> Outcome {
        let name = format!("{suffix}.csv");
        self.out.csv(&name, table)?;
        if self.cli.gnuplot {
            let script = gnuplot_stub(&self.out.path(&name), header, xlabel, log_y);
            self.out.text(&format!("{suffix}.gp"), &script)?;
        }
        Ok(())
    }

    /// Writes the manifest whatever the outcome, then passes the outcome on.
    fn finish(mut self, outcome: Outcome) -> Outcome {
        let status = match &outcome {
            Ok(()) => "ok".to_string(),
            Err(f) => format!("error (exit {}): {}", f.code(), f.message()),
        };
        let path = self.out.path(".manifest.json");
        let mut files = self.out.written().to_vec();
        files.push(path.display().to_string());
        let body = serde_json::to_string_pretty(&self.manifest.to_json(&files, &status)).unwrap_or_default();
        self.out.text(".manifest.json", &(body + "\n"))?;
        outcome
    }
}

fn range(flag: &str, s: &str) -> Result<Vec<f64>, Failure> {
    parse_range(s).map_err(|e| Failure::Validation(format!("--{flag}: {e}")))
}

pub fn dispatch(cli: &Cli, argv: Vec<String>) -> Outcome {
    let (name, params) = describe(&cli.command);
    let prefix = cli.out.clone().unwrap_or_else(|| PathBuf::from(name));
    let mut manifest = Manifest::new(name, argv, params);
    manifest.workers = cli.workers;
    let mut run = Run { cli, out: Outputs::new(&prefix)?, manifest };
    let outcome = match &cli.command {
        Command::Band(a) => band(&mut run, a),
        Command::Winding(a) => winding(&mut run, a),
        Command::Chain(a) => chain(&mut run, a),
        Command::PhaseDiagram(a) => phase(&mut run, a),
        Command::Disorder(a) => disorder(&mut run, a),
        Command::Circuit(a) => circuit(&mut run, &a.kind),
        Command::Ssh(a) => ssh(&mut run, a),
        Command::Replay { .. } => unreachable!("replay is handled before dispatch"),
    };
    run.finish(outcome)
}

fn couplings_json(t_par: f64, t_perp: f64, g: f64) -> Value {
    json!({ "t_par": t_par, "t_perp": t_perp, "g": g })
}

fn describe(c: &Command) -> (&'static str, Value) {
    match c {
        Command::Band(a) => {
            let mut v = couplings_json(a.couplings.t_par, a.couplings.t_perp, a.couplings.g);
            v["theta_deg"] = json!(a.theta);
            v["k_points"] = json!(a.k_points);
            ("band", v)
        }
        Command::Winding(a) => {
            let mut v = couplings_json(a.couplings.t_par, a.couplings.t_perp, a.couplings.g);
            v["k_intervals"] = json!(a.k_points);
            ("winding", v)
        }
        Command::Chain(a) => {
            let mut v = couplings_json(a.couplings.t_par, a.couplings.t_perp, a.couplings.g);
            v["n"] = json!(a.n);
            v["states"] = json!(a.states);
            ("chain", v)
        }
        Command::PhaseDiagram(a) => (
            "phase-diagram",
            json!({
                "t_par": a.t_par, "t_perp_range": a.t_perp_range, "g_range": a.g_range, "n": a.n,
                "rule": format!("{:?}", a.rule), "threshold": a.threshold,
            }),
        ),
        Command::Disorder(a) => (
            "disorder",
            json!({
                "t_par": a.t_par, "t_perp": a.t_perp, "realizations": a.realizations, "seed": a.seed,
                "range": a.range, "g_range": a.g_range, "n": a.n, "sg_window": a.sg_window,
                "mode": format!("{:?}", a.mode), "freeze_g": a.freeze_g,
            }),
        ),
        Command::Circuit(a) => match &a.kind {
            CircuitCommand::Transmon(c) => ("circuit", circuit_json("transmon", c, None)),
            CircuitCommand::Ptransmon { common, c, cprime } => {
                ("circuit", circuit_json("ptransmon", common, Some((*c, *cprime))))
            }
        },
        Command::Ssh(a) => (
            "ssh",
            json!({
                "v": a.v, "w": a.w, "n": a.n, "cell": format!("{:?}", a.cell),
                "bulk_band": format!("{:?}", a.bulk_band),
            }),
        ),
        Command::Replay { manifest } => ("replay", json!({ "manifest": manifest })),
    }
}

fn circuit_json(kind: &str, c: &CircuitCommon, caps: Option<(f64, f64)>) -> Value {
    json!({
        "circuit": kind, "ratio_range": c.ratio_range, "levels": c.levels, "transitions": c.transitions,
        "probe": format!("{:?}", c.probe), "panels": c.panels.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>(),
        "c_ff": caps.map(|x| x.0), "cprime_ff": caps.map(|x| x.1),
    })
}

fn band(run: &mut Run, a: &BandArgs) -> Outcome {
    let c = &a.couplings;
    let theta = if a.theta == 90.0 { FRAC_PI_2 } else { a.theta.to_radians() };
    let p = ZigZagParams::new(c.t_par, c.t_perp, c.g, 1).with_theta(theta);
    p.validate()?;
    if a.k_points < 2 {
        return Err(Failure::Validation("--k-points must be at least 2".into()));
    }
    if !p.is_right_angle() && c.g != 0.0 {
        return Err(Error::Unsupported("the g coupling is defined only for a 90 degree bond angle".into()).into());
    }
    let header = ["K", "E1", "E2", "E3", "E4"];
    let mut table = Csv::new(&header);
    let mut gap_min = (f64::INFINITY, 0.0);
    for k in linspace(-PI, PI, a.k_points) {
        let mut e: Vec<f64> = if p.is_right_angle() {
            bands_extended(k, &p)?.to_vec()
        } else {
            eigvals_hermitian(&bloch_zz_nn(k, &p)?)?
        };
        e.sort_by(f64::total_cmp);
        if e[2] - e[1] < gap_min.0 {
            gap_min = (e[2] - e[1], k);
        }
        table.reals(&[k, e[0], e[1], e[2], e[3]]);
    }
    run.csv("", &table, &header, "K", false)?;
    run.manifest.result("gap_min", gap_min.0);
    run.manifest.result("k_at_gap_min", gap_min.1);
    Ok(())
}

fn winding(run: &mut Run, a: &WindingArgs) -> Outcome {
    let c = &a.couplings;
    let p = ZigZagParams::new(c.t_par, c.t_perp, c.g, 1);
    let contour = winding_contour(&p, a.k_points)?;
    let header = ["K", "Re_detQ", "Im_detQ", "arg_detQ"];
    let mut table = Csv::new(&header);
    for (k, z) in contour.k_samples.iter().zip(&contour.det_values) {
        table.reals(&[*k, z.re, z.im, z.arg()]);
    }
    run.csv("", &table, &header, "K", false)?;
    run.manifest.result("raw_winding", contour.raw_winding);
    run.manifest.result("min_abs_det", contour.min_abs_det);
    run.manifest.result("g_c", phase_boundary(c.t_par, c.t_perp));
    let w = winding_number(&p, a.k_points)?;
    let value = w.winding.expect("gapped contour has a winding");
    run.manifest.result("winding", value);
    println!("{value}");
    Ok(())
}

fn state_table(s: &PolarizedState) -> Csv {
    let mut t = Csv::new(&["site", "re_x", "im_x", "re_y", "im_y"]);
    for (site, (x, y)) in s.amp_x.iter().zip(&s.amp_y).enumerate() {
        let mut row = vec![site.to_string()];
        row.extend([x.re, x.im, y.re, y.im].iter().map(|&v| real(v)));
        t.row(row);
    }
    t
}

fn chain(run: &mut Run, a: &ChainArgs) -> Outcome {
    let c = &a.couplings;
    let h = build_zigzag_chain(&ZigZagParams::new(c.t_par, c.t_perp, c.g, a.n))?;
    let (s, states) = diagonalize_chain(&h)?;
    let mut spectrum = Csv::new(&["index", "energy"]);
    for (k, e) in s.eigenvalues().iter().enumerate() {
        spectrum.row(vec![k.to_string(), real(*e)]);
    }
    run.csv("_spectrum", &spectrum, &["index", "energy"], "index", false)?;
    run.manifest.result("chiral_pairing_defect", chiral_pairing_defect(s.eigenvalues()));
    let selected: Vec<(usize, PolarizedState)> = match a.states.as_deref() {
        None => Vec::new(),
        Some("all") => states.into_iter().enumerate().collect(),
        Some("mid-spectrum") => {
            let k = select_state(s.len(), StateRule::MidSpectrum)?;
            let [lower, _] = central_doublet(&h, &s)?;
            vec![(k, lower)]
        }
        Some("mid-bulk") => {
            let k = select_state(s.len(), StateRule::MidBulk)?;
            vec![(k, states[k].clone())]
        }
        Some(other) => {
            let k: usize = other.parse().map_err(|_| {
                Failure::Validation(format!("--states: expected all, mid-spectrum, mid-bulk or an index, got '{other}'"))
            })?;
            let k = select_state(s.len(), StateRule::Index(k))?;
            vec![(k, states[k].clone())]
        }
    };
    let mut profiles = Vec::new();
    for (k, state) in &selected {
        run.out.csv(&format!("_state_{k}.csv"), &state_table(state))?;
        let p = edge_profile(state)?;
        profiles.push(json!({
            "index": k, "energy": state.energy, "norm": state.norm_sqr().sqrt(), "ipr": ipr(state)?,
            "left_weight_x": p.left_weight_x, "right_weight_x": p.right_weight_x,
            "left_weight_y": p.left_weight_y, "right_weight_y": p.right_weight_y,
            "polarizations_opposite": p.polarizations_opposite(),
        }));
    }
    run.manifest.result("states", profiles);
    Ok(())
}

fn phase(run: &mut Run, a: &PhaseArgs) -> Outcome {
    let t_perp = range("t-perp-range", &a.t_perp_range)?;
    let g = range("g-range", &a.g_range)?;
    let rule = match a.rule {
        Rule::MidSpectrum => StateRule::MidSpectrum,
        Rule::MidBulk => StateRule::MidBulk,
    };
    let d = phase_diagram_sweep(a.t_par, &t_perp, &g, a.n, rule, run.cli.workers)?;
    let header = ["t_perp", "g", "ipr"];
    let mut table = Csv::new(&header);
    for (i, tp) in d.t_perp_axis.iter().enumerate() {
        for (j, gv) in d.g_axis.iter().enumerate() {
            table.reals(&[*tp, *gv, d.ipr_grid[i][j]]);
        }
    }
    run.out.csv(".csv", &table)?;
    if run.cli.gnuplot {
        let file = run.out.path(".csv").file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let script = format!(
            "set datafile separator ','\nset xlabel 't_perp'\nset ylabel 'g'\nset view map\n\
             splot '{file}' using 1:2:3 every ::1 with image\n"
        );
        run.out.text(".gp", &script)?;
    }
    if let Some(threshold) = a.threshold {
        let columns: Vec<Value> = d
            .t_perp_axis
            .iter()
            .zip(&d.ipr_grid)
            .map(|(tp, col)| {
                json!({
                    "t_perp": tp, "g_c": phase_boundary(a.t_par, *tp),
                    "ipr_boundary": ipr_boundary(&d.g_axis, col, threshold),
                })
            })
            .collect();
        run.manifest.result("boundaries", columns);
    }
    Ok(())
}

fn disorder(run: &mut Run, a: &DisorderArgs) -> Outcome {
    let g = range("g-range", &a.g_range)?;
    let spec = DisorderSpec {
        base: ZigZagParams::new(a.t_par, a.t_perp, 0.0, a.n),
        relative_range: a.range,
        realizations: a.realizations,
        master_seed: a.seed,
        mode: match a.mode {
            Mode::Bond => DisorderMode::BondResolved,
            Mode::Global => DisorderMode::Global,
        },
        freeze_g: a.freeze_g,
    };
    run.manifest.master_seed = Some(a.seed);
    let d = dispersion_vs_g(&spec, &g, a.n, a.sg_window, run.cli.workers);
    if let Err(Error::Ensemble { failed, total }) = &d {
        run.manifest.failures = json!({ "failed": failed, "total": total });
    }
    let d = d?;
    run.manifest.failures = json!({ "per_g": d.failures, "total": d.failures.iter().sum::<usize>() });
    let header = ["g", "sigma_edge", "sigma_bulk", "sigma_edge_smoothed", "sigma_bulk_smoothed"];
    let mut table = Csv::new(&header);
    for i in 0..d.g_axis.len() {
        table.reals(&[
            d.g_axis[i],
            d.sigma_edge[i],
            d.sigma_bulk[i],
            d.sigma_edge_smoothed[i],
            d.sigma_bulk_smoothed[i],
        ]);
    }
    run.csv("", &table, &header, "g", false)
}

fn circuit(run: &mut Run, cmd: &CircuitCommand) -> Outcome {
    let (kind, c) = match cmd {
        CircuitCommand::Transmon(c) => (CircuitKind::Transmon, c),
        CircuitCommand::Ptransmon { common, c, cprime } => {
            (CircuitKind::PolTransmon { c_axial: *c, c_diag: *cprime }, common)
        }
    };
    let ratios = range("ratio-range", &c.ratio_range)?;
    let has = |p: Panel| c.panels.contains(&p);
    let transitions = c.transitions.unwrap_or(kind.max_transitions());
    if has(Panel::Dispersion) && (c.levels == 0 || c.levels > kind.max_dispersion_levels()) {
        return Err(Failure::Validation(format!("--levels must be in 1..={}", kind.max_dispersion_levels())));
    }
    if has(Panel::Levels) && (transitions == 0 || transitions > kind.max_transitions()) {
        return Err(Failure::Validation(format!("--transitions must be in 1..={}", kind.max_transitions())));
    }
    let probe = match c.probe {
        Probe::Ng1 => DispersionProbe::Single,
        Probe::Rss => DispersionProbe::RootSumSquare,
    };
    let workers = run.cli.workers;
    if has(Panel::Dispersion) {
        let curve = run_pool(workers, || charge_dispersion(kind, &ratios, c.levels, probe))??;
        let mut header = vec!["ratio".to_string()];
        header.extend((0..c.levels).map(|m| format!("eps_{m}_over_E01")));
        let mut table = Csv::new(&header);
        for (r, row) in curve.ratio_axis.iter().zip(&curve.values) {
            let mut fields = vec![real(*r)];
            fields.extend(row.iter().map(|v| match v {
                DispersionValue::Value(x) => real(*x),
                DispersionValue::BelowFloor => "below_floor".to_string(),
            }));
            table.row(fields);
        }
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        run.csv("_dispersion", &table, &refs, "E_J/E_C", true)?;
        let fit = if c.levels >= 2 {
            match wkb_exponent_fit(&curve) {
                Ok(f) => json!({ "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared }),
                Err(e) => json!({ "unavailable": e.to_string() }),
            }
        } else {
            json!({ "unavailable": "level 1 not computed" })
        };
        run.manifest.result("wkb_fit", fit);
        run.manifest.result("wkb_coefficient", kind.wkb_coefficient());
    }
    if has(Panel::Levels) {
        let t = run_pool(workers, || level_curves(kind, &ratios, transitions))??;
        let mut header = vec!["ratio".to_string()];
        header.extend((1..=transitions).map(|n| format!("E{n}0")));
        let mut table = Csv::new(&header);
        for (r, row) in t.ratio_axis.iter().zip(&t.rows) {
            let mut v = vec![*r];
            v.extend(row);
            table.reals(&v);
        }
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        run.csv("_levels", &table, &refs, "E_J/E_C", false)?;
    }
    if has(Panel::Anharmonicity) {
        let rows = run_pool(workers, || anharmonicity(kind, &ratios))??;
        let header: Vec<String> = match kind {
            CircuitKind::Transmon => vec!["ratio".into(), "alpha".into()],
            CircuitKind::PolTransmon { .. } => {
                vec!["ratio".into(), "alpha_1".into(), "alpha_2".into(), "alpha_3".into()]
            }
        };
        let mut table = Csv::new(&header);
        for (r, row) in ratios.iter().zip(&rows) {
            let mut v = vec![*r];
            v.extend(row);
            table.reals(&v);
        }
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        run.csv("_anharmonicity", &table, &refs, "E_J/E_C", false)?;
    }
    Ok(())
}

fn ssh(run: &mut Run, a: &SshArgs) -> Outcome {
    let h = build_ssh_chain(&SSHParams::new(a.v, a.w, a.n))?;
    let s = eig_hermitian(&h.matrix)?;
    let mut spectrum = Csv::new(&["index", "energy"]);
    for (k, e) in s.eigenvalues().iter().enumerate() {
        spectrum.row(vec![k.to_string(), real(*e)]);
    }
    run.csv("_spectrum", &spectrum, &["index", "energy"], "index", false)?;
    let k0 = (0..s.len())
        .min_by(|&x, &y| s.eigenvalue(x).abs().total_cmp(&s.eigenvalue(y).abs()))
        .ok_or_else(|| Failure::Validation("empty chain".into()))?;
    let mut profile = Csv::new(&["site", "sublattice", "re", "im"]);
    for (label, z) in h.labels.iter().zip(s.vector(k0)) {
        if let SiteLabel::Sublattice { site, sub } = label {
            let tag = if *sub == Sublattice::A { "A" } else { "B" };
            profile.row(vec![site.to_string(), tag.to_string(), real(z.re), real(z.im)]);
        }
    }
    run.out.csv("_profile.csv", &profile)?;
    run.manifest.result("zero_mode_energy", s.eigenvalue(k0));
    let fit = edge_decay_fit(&h, &s)?;
    run.manifest.result(
        "decay_fit",
        json!({ "ratio": fit.ratio, "residual": fit.residual, "points": fit.points, "energy": fit.energy }),
    );
    let convention = match a.cell {
        Cell::Left => CellConvention::Left,
        Cell::Right => CellConvention::Right,
    };
    let band = match a.bulk_band {
        crate::Band::Lower => BulkBand::Lower,
        crate::Band::Upper => BulkBand::Upper,
    };
    let path = band_ratio_path(&h, &s, band, convention)?;
    let header = ["K", "Re_ratio", "Im_ratio"];
    let mut table = Csv::new(&header);
    for (k, z) in path.k_samples.iter().zip(&path.ratio_values) {
        table.reals(&[*k, z.re, z.im]);
    }
    run.csv("_ratio_path", &table, &header, "K", false)?;
    run.manifest.result("ratio_path_winding", path.winding);
    println!("decay_ratio {}", real(fit.ratio));
    println!("ratio_path_winding {}", path.winding);
    Ok(())
}
