//! Preset-call parsing: `name(arg, key=value, ...)` with paren-aware
//! argument splitting, mapped onto the library preset constructors.

use hk_core::calculus::{Functional1, Functional2, GSpec};
use hk_core::expr::{parse_expr, rat_int, Rat};
use hk_core::fields::{presets as fam, DilationFamily, VectorField};
use hk_core::geometry::{presets as geo, Domain};

/// Split `name(a, b, c)` into the name and top-level comma-separated args.
pub fn parse_call(s: &str) -> Result<(String, Vec<String>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        // Bare name, no arguments.
        if s.is_empty()
            || !s
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
        {
            return Err(format!("malformed preset `{s}`"));
        }
        return Ok((s.to_string(), Vec::new()));
    };
    if !s.ends_with(')') {
        return Err(format!("malformed preset `{s}`: missing `)`"));
    }
    let name = s[..open].trim().to_string();
    let body = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in body.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                args.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    if !cur.trim().is_empty() {
        args.push(cur.trim().to_string());
    }
    if args.iter().any(|a| a.is_empty()) {
        return Err(format!("empty argument in `{s}`"));
    }
    Ok((name, args))
}

fn parse_usize(a: &str) -> Result<usize, String> {
    a.parse()
        .map_err(|_| format!("expected an integer, got `{a}`"))
}

fn parse_u32(a: &str) -> Result<u32, String> {
    a.parse()
        .map_err(|_| format!("expected an integer, got `{a}`"))
}

pub fn parse_f64(a: &str) -> Result<f64, String> {
    if let Some((num, den)) = a.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad number `{a}`"))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad number `{a}`"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in `{a}`"));
        }
        return Ok(n / d);
    }
    a.parse().map_err(|_| format!("bad number `{a}`"))
}

pub fn parse_rat(a: &str) -> Result<Rat, String> {
    if let Some((num, den)) = a.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad rational `{a}`"))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad rational `{a}`"))?;
        if d == 0 {
            return Err(format!("zero denominator in `{a}`"));
        }
        return Ok(Rat::new(n.into(), d.into()));
    }
    let n: i64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{a}`"))?;
    Ok(rat_int(n))
}

/// `euclidean(n)`, `grushin(n1, n2, k)`, `bony(n)`.
pub fn family_preset(call: &str) -> Result<(Vec<VectorField>, DilationFamily), String> {
    let (name, args) = parse_call(call)?;
    match name.as_str() {
        "euclidean" => {
            if args.len() != 1 {
                return Err("euclidean(n) takes one argument".into());
            }
            let n = parse_usize(&args[0])?;
            if !(1..=6).contains(&n) {
                return Err("euclidean dimension must be in 1..=6".into());
            }
            Ok(fam::euclidean(n))
        }
        "grushin" => {
            if args.len() != 3 {
                return Err("grushin(n1, n2, k) takes three arguments".into());
            }
            let n1 = parse_usize(&args[0])?;
            let n2 = parse_usize(&args[1])?;
            let k = parse_u32(&args[2])?;
            if n1 == 0 || n2 == 0 || k == 0 || n1 + n2 > 6 || k > 8 {
                return Err("grushin arguments out of range".into());
            }
            Ok(fam::grushin(n1, n2, k))
        }
        "bony" => {
            if args.len() != 1 {
                return Err("bony(n) takes one argument".into());
            }
            let n = parse_usize(&args[0])?;
            if !(2..=6).contains(&n) {
                return Err("bony dimension must be in 2..=6".into());
            }
            Ok(fam::bony(n))
        }
        other => Err(format!("unknown family preset `{other}`")),
    }
}

/// `disk(cx, cy, R)`, `box(lo1, hi1, lo2, hi2[, lo3, hi3])`,
/// `ellipse(a, b, cx, cy)`, `ball3(cx, cy, cz, R)`, `radial2d(expr[, cx, cy])`.
pub fn domain_preset(call: &str) -> Result<Domain, String> {
    let (name, args) = parse_call(call)?;
    let f = |i: usize| parse_f64(&args[i]);
    match name.as_str() {
        "disk" => {
            if args.len() != 3 {
                return Err("disk(cx, cy, R) takes three arguments".into());
            }
            geo::disk([f(0)?, f(1)?], f(2)?).map_err(|e| e.to_string())
        }
        "box" => {
            if args.len() != 4 && args.len() != 6 {
                return Err("box takes 4 or 6 bounds".into());
            }
            let vals: Result<Vec<f64>, _> = (0..args.len()).map(f).collect();
            let vals = vals?;
            let bounds = vals.chunks(2).map(|c| (c[0], c[1])).collect();
            geo::box_domain(bounds).map_err(|e| e.to_string())
        }
        "ellipse" => {
            if args.len() != 4 {
                return Err("ellipse(a, b, cx, cy) takes four arguments".into());
            }
            geo::ellipse(f(0)?, f(1)?, [f(2)?, f(3)?]).map_err(|e| e.to_string())
        }
        "ball3" => {
            if args.len() != 4 {
                return Err("ball3(cx, cy, cz, R) takes four arguments".into());
            }
            geo::ball3([f(0)?, f(1)?, f(2)?], f(3)?).map_err(|e| e.to_string())
        }
        "radial2d" => {
            if args.is_empty() || args.len() == 2 || args.len() > 3 {
                return Err("radial2d(expr[, cx, cy])".into());
            }
            let expr = parse_expr(&args[0]).map_err(|e| e.to_string())?;
            let center = if args.len() == 3 {
                [f(1)?, f(2)?]
            } else {
                [0.0, 0.0]
            };
            geo::radial2d(expr, center).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown domain preset `{other}`")),
    }
}

pub enum FunctionalPreset {
    Order1(Functional1),
    Order2(Functional2),
}

fn g_from_kv(args: &[String]) -> Result<(Option<Rat>, GSpec), String> {
    let mut k: Option<Rat> = None;
    let mut g = GSpec::Zero;
    let mut g_set = false;
    for a in args {
        let Some((key, value)) = a.split_once('=') else {
            return Err(format!("expected key=value, got `{a}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "k" => k = Some(parse_rat(value)?),
            "s" => {
                if g_set {
                    return Err("give at most one of s= and g=".into());
                }
                let s: u32 = value.parse().map_err(|_| format!("bad s `{value}`"))?;
                if !(2..=64).contains(&s) {
                    return Err("s must be in 2..=64".into());
                }
                g = GSpec::Power { s };
                g_set = true;
            }
            "g" => {
                if g_set {
                    return Err("give at most one of s= and g=".into());
                }
                g = GSpec::Custom(parse_expr(value).map_err(|e| e.to_string())?);
                g_set = true;
            }
            other => return Err(format!("unknown key `{other}`")),
        }
    }
    Ok((k, g))
}

/// `dirichlet-k-laplacian(k=2[, s=4|g=(expr)])` or
/// `horizontal-biharmonic([s=4|g=(expr)])`; n and m come from the family.
pub fn functional_preset(call: &str, n: usize, m: usize) -> Result<FunctionalPreset, String> {
    let (name, args) = parse_call(call)?;
    match name.as_str() {
        "dirichlet-k-laplacian" => {
            let (k, g) = g_from_kv(&args)?;
            let k = k.ok_or("dirichlet-k-laplacian requires k=")?;
            Functional1::p_norm_minus_g(n, m, k, g)
                .map(FunctionalPreset::Order1)
                .map_err(|e| e.to_string())
        }
        "horizontal-biharmonic" => {
            let (k, g) = g_from_kv(&args)?;
            if k.is_some() {
                return Err("horizontal-biharmonic takes no k".into());
            }
            Functional2::horizontal_biharmonic(n, m, g)
                .map(FunctionalPreset::Order2)
                .map_err(|e| e.to_string())
        }
        other => Err(format!("unknown functional preset `{other}`")),
    }
}

pub fn list_presets() -> String {
    let mut out = String::new();
    out.push_str("family presets:\n");
    out.push_str("  euclidean(n)            X_i = d/dx_i, sigma = (1,...,1)\n");
    out.push_str(
        "  grushin(n1, n2, k)      d/dy_i and y_i^k d/dt_j, sigma = (1,..,1,k+1,..,k+1)\n",
    );
    out.push_str(
        "  bony(n)                 d/dx_1 and sum x_1^{j-1}/(j-1)! d/dx_j, sigma = (1,..,n)\n",
    );
    out.push_str("functional presets:\n");
    out.push_str("  dirichlet-k-laplacian(k=K[, s=S|g=(expr)])   F = |p|^k/k - G(z)\n");
    out.push_str("  horizontal-biharmonic([s=S|g=(expr)])        F = (sum r_ii)^2/2 - G(z)\n");
    out.push_str("domain presets:\n");
    out.push_str("  disk(cx, cy, R)\n");
    out.push_str("  box(lo1, hi1, lo2, hi2[, lo3, hi3])\n");
    out.push_str("  ellipse(a, b, cx, cy)\n");
    out.push_str("  ball3(cx, cy, cz, R)\n");
    out.push_str("  radial2d(expr[, cx, cy])      boundary radius r(theta)\n");
    out
}
