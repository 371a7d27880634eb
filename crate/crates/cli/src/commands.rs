//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pcrk::integrator::{empirical_order, riccati_problem, IVProblem, StepOptions};
use pcrk::polyalg::max_coeff_discrepancy;
use pcrk::region::{
    imag_axis_limit, max_stable_step, real_axis_limit, scan, sweep_efficiency, write_boundary_csv,
    write_boundary_svg, write_grid_csv, ComplexWindow,
};
use pcrk::stability::{
    pc_stability_polynomial, poles_and_radius, stability_function, verify_main_theorem, THEOREM_TOL,
};
use pcrk::tableau::{
    builtin, check_order_conditions, compose_pc_tableau, load_tableau, ButcherTableau, PCScheme,
    BUILTIN_NAMES,
};

use crate::error::CliError;
use crate::format::{rational, sig6};
use crate::spectrum::{parse_spectrum, upwind_spectrum};
use crate::{
    Axis, CompareArgs, MaxstepArgs, OrderTestArgs, OutputFormat, Problem, RegionArgs,
    StabilityArgs, TableauArgs, WindowArgs,
};

type CliResult<T = ()> = Result<T, CliError>;

/// Built-in name first, then a tableau file.
pub fn resolve_method(method: &str) -> CliResult<ButcherTableau> {
    if BUILTIN_NAMES.contains(&method) {
        return Ok(builtin(method)?);
    }
    if Path::new(method).is_file() {
        return Ok(load_tableau(method)?);
    }
    Err(CliError::usage(format!(
        "unknown method `{method}` (built-ins: {}; or a JSON tableau file)",
        BUILTIN_NAMES.join(", ")
    )))
}

fn window(args: &WindowArgs) -> CliResult<ComplexWindow> {
    ComplexWindow::new(
        args.re_min,
        args.re_max,
        args.im_min,
        args.im_max,
        args.nx,
        args.ny,
    )
    .map_err(|e| CliError::validation(e.to_string()))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn coefficient_label(x: f64) -> String {
    match rational(x) {
        Some(r) if r.contains('/') => format!("{r}≈{}", sig6(x)),
        _ => sig6(x),
    }
}

pub fn tableau(args: &TableauArgs, out: &mut dyn Write) -> CliResult {
    let t = resolve_method(&args.method)?;
    writeln!(out, "{t}")?;
    let report = check_order_conditions(&t, 4)?;
    writeln!(out)?;
    writeln!(out, "order conditions (tolerance 1e-12):")?;
    for c in &report.conditions {
        writeln!(
            out,
            "  p={} {:<28} {:>10} expected {:>10}  {}",
            c.order,
            c.label,
            sig6(c.value),
            sig6(c.expected),
            if c.passed { "ok" } else { "violated" }
        )?;
    }
    writeln!(
        out,
        "satisfied order: {} (declared {})",
        report.satisfied_order(),
        t.order()
    )?;
    if let Some(m) = args.compose {
        let scheme = PCScheme::new(t, m);
        let composed = compose_pc_tableau(&scheme);
        writeln!(out)?;
        writeln!(out, "{composed}")?;
    }
    Ok(())
}

pub fn stability(args: &StabilityArgs, out: &mut dyn Write) -> CliResult {
    let t = resolve_method(&args.method)?;
    if let Some(m_max) = args.m_max {
        let report = verify_main_theorem(&t, m_max);
        for c in &report.checks {
            writeln!(out, "m={:<3} max discrepancy {:.3e}", c.m, c.discrepancy)?;
        }
        if !report.passed() {
            return Err(CliError::numerical(format!(
                "main theorem check failed for {}: max discrepancy {:.3e} > {THEOREM_TOL:e}",
                t.name(),
                report.max_discrepancy()
            )));
        }
        writeln!(
            out,
            "main theorem verified for {} (m <= {m_max}), max discrepancy {:.3e} <= {THEOREM_TOL:e}",
            t.name(),
            report.max_discrepancy()
        )?;
        return Ok(());
    }
    let m = args.m.expect("clap enforces --m or --m-max");
    let name = t.name().to_string();
    let scheme = PCScheme::new(t, m);
    let p = pc_stability_polynomial(&scheme);
    writeln!(
        out,
        "stability polynomial of {name} with m={m} (order {})",
        scheme.order()
    )?;
    writeln!(out, "{:>4}  {:>24}  {:>12}", "n", "coefficient", "1/n!")?;
    let mut factorial = 1.0;
    for n in 0..=m + 1 {
        if n > 0 {
            factorial *= n as f64;
        }
        writeln!(
            out,
            "{n:>4}  {:>24}  {:>12}",
            coefficient_label(p.coeff(n)),
            sig6(1.0 / factorial)
        )?;
    }
    let r = stability_function(&scheme.corrector).rational.normalized();
    writeln!(
        out,
        "corrector stability function: ({}) / ({})",
        r.num(),
        r.den()
    )?;
    match poles_and_radius(&scheme.corrector) {
        Ok(poles) if poles.poles.is_empty() => {
            writeln!(out, "poles: none (polynomial stability function)")?
        }
        Ok(poles) => {
            let list: Vec<String> = poles
                .poles
                .iter()
                .map(|z| {
                    let sign = if z.im < 0.0 { '-' } else { '+' };
                    format!("{} {sign} {}i", sig6(z.re), sig6(z.im.abs()))
                })
                .collect();
            writeln!(out, "poles: {}", list.join(", "))?;
            writeln!(out, "radius of convergence: {}", sig6(poles.radius))?;
        }
        Err(e) => writeln!(out, "poles: none ({e})")?,
    }
    Ok(())
}

pub fn region(args: &RegionArgs, out: &mut dyn Write) -> CliResult {
    let t = resolve_method(&args.method)?;
    let p = pc_stability_polynomial(&PCScheme::new(t, args.m));
    if let Some(axis) = args.axis {
        let limit = match axis {
            Axis::Real => real_axis_limit(&p),
            Axis::Imag => imag_axis_limit(&p),
        };
        writeln!(out, "{}", sig6(limit))?;
        return Ok(());
    }
    let w = window(&args.window)?;
    let format = match (args.format, &args.out) {
        (Some(f), _) => f,
        (None, Some(path)) => match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => OutputFormat::Csv,
            Some("svg") => OutputFormat::Svg,
            _ => {
                return Err(CliError::usage(format!(
                    "cannot infer format from {}; pass --format",
                    path.display()
                )))
            }
        },
        (None, None) => OutputFormat::Text,
    };
    let region = scan(&p, &w)?;
    match (format, &args.out) {
        (OutputFormat::Csv, Some(path)) => write_grid_csv(&region, create(path)?)?,
        (OutputFormat::Csv, None) => write_grid_csv(&region, &mut *out)?,
        (OutputFormat::Svg, Some(path)) => write_boundary_svg(&region.boundary, &w, create(path)?)?,
        (OutputFormat::Svg, None) => write_boundary_svg(&region.boundary, &w, &mut *out)?,
        (OutputFormat::Text, _) => {
            writeln!(out, "polynomial: {p}")?;
            writeln!(
                out,
                "window: [{}, {}] x [{}, {}], {} x {} nodes",
                w.re_min, w.re_max, w.im_min, w.im_max, w.nx, w.ny
            )?;
            writeln!(out, "stable fraction: {}", sig6(region.inside_fraction()))?;
            writeln!(out, "boundary polylines: {}", region.boundary.len())?;
            writeln!(out, "real-axis limit: {}", sig6(real_axis_limit(&p)))?;
            writeln!(out, "imaginary-axis limit: {}", sig6(imag_axis_limit(&p)))?;
        }
    }
    if let Some(path) = &args.boundary {
        write_boundary_csv(&region.boundary, create(path)?)?;
    }
    Ok(())
}

fn parse_pair(spec: &str) -> CliResult<(String, usize)> {
    let (method, m) = spec
        .rsplit_once(':')
        .ok_or_else(|| CliError::usage(format!("expected `method:m`, got `{spec}`")))?;
    let m = m
        .parse()
        .map_err(|_| CliError::usage(format!("`{m}` in `{spec}` is not a correction count")))?;
    Ok((method.to_string(), m))
}

fn file_stem(method: &str) -> String {
    Path::new(method)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(method)
        .to_string()
}

/// Writes one boundary file per scheme and returns their paths.
pub fn compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    let w = window(&args.window)?;
    let mut rows = Vec::new();
    for spec in &args.schemes {
        let (method, m) = parse_pair(spec)?;
        let scheme = PCScheme::new(resolve_method(&method)?, m);
        rows.push((spec.clone(), file_stem(&method), scheme));
    }
    let mut written = Vec::new();
    writeln!(
        out,
        "{:<28} {:>5} {:>6} {:>12} {:>12} {:>12}",
        "scheme", "order", "sweeps", "real limit", "imag limit", "efficiency"
    )?;
    let mut polys = Vec::new();
    for (spec, stem, scheme) in &rows {
        let p = pc_stability_polynomial(scheme);
        let region = scan(&p, &w)?;
        let csv = PathBuf::from(format!("{}-{stem}-m{}.csv", args.out, scheme.m));
        write_boundary_csv(&region.boundary, create(&csv)?)?;
        written.push(csv);
        if args.svg {
            let svg = PathBuf::from(format!("{}-{stem}-m{}.svg", args.out, scheme.m));
            write_boundary_svg(&region.boundary, &w, create(&svg)?)?;
            written.push(svg);
        }
        writeln!(
            out,
            "{:<28} {:>5} {:>6} {:>12} {:>12} {:>12}",
            spec,
            scheme.order(),
            scheme.sweeps(),
            sig6(real_axis_limit(&p)),
            sig6(imag_axis_limit(&p)),
            sig6(sweep_efficiency(scheme))
        )?;
        polys.push((spec, p));
    }
    for (i, (a, pa)) in polys.iter().enumerate() {
        for (b, pb) in &polys[i + 1..] {
            if max_coeff_discrepancy(pa.coeffs(), pb.coeffs()) <= THEOREM_TOL {
                writeln!(out, "identical stability polynomials: {a} and {b}")?;
            }
        }
    }
    for path in &written {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(written)
}

pub fn order_test(args: &OrderTestArgs, out: &mut dyn Write) -> CliResult {
    let t = resolve_method(&args.method)?;
    let scheme = PCScheme::new(t, args.m);
    let prob = match args.problem {
        Problem::Riccati => riccati_problem(),
        Problem::Linear => IVProblem::new(|_, y: &[f64]| vec![-y[0]], vec![1.0], 0.0, 1.0)?
            .with_exact(|t| vec![(-t).exp()]),
    };
    let study = empirical_order(&prob, &scheme, args.h0, args.levels, StepOptions::default())?;
    writeln!(out, "{:>12} {:>14} {:>8}", "h", "error", "rate")?;
    for (k, level) in study.levels.iter().enumerate() {
        let rate = match study.levels.get(k.wrapping_sub(1)) {
            Some(prev) if k > 0 && !prev.saturated && !level.saturated => {
                sig6((prev.error / level.error).log2())
            }
            _ => "-".into(),
        };
        let mark = if level.saturated { " (saturated)" } else { "" };
        writeln!(
            out,
            "{:>12} {:>14} {:>8}{mark}",
            sig6(level.h),
            sig6(level.error),
            rate
        )?;
    }
    writeln!(
        out,
        "observed order {} (expected {})",
        sig6(study.observed),
        scheme.order()
    )?;
    Ok(())
}

pub fn maxstep(args: &MaxstepArgs, out: &mut dyn Write) -> CliResult {
    let t = resolve_method(&args.method)?;
    let p = pc_stability_polynomial(&PCScheme::new(t, args.m));
    let spectrum: Vec<Complex64> = match (&args.spectrum, args.upwind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            parse_spectrum(&text)?
        }
        (None, Some(n)) if n > 0 => upwind_spectrum(n),
        (None, Some(_)) => return Err(CliError::usage("--upwind needs at least one point")),
        (None, None) => unreachable!("clap enforces --spectrum or --upwind"),
    };
    let h = max_stable_step(&p, &spectrum)?;
    writeln!(out, "h_max = {}", sig6(h))?;
    Ok(())
}
