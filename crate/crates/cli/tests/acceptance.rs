//! One line per acceptance criterion, with the tolerance each one is held to.
//! Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::{num_complex::Complex, FftPlanner};

use thumbscope_cli::commands::*;
use thumbscope_cli::synth::{generate, SynthSpec};
use thumbscope_cli::RunConfig;
use thumbscope_core::features::filterbank::{
    pool_span, respond_planes, sparseness_variability, symmetry_features, window_origins, FilterBank, ResponseStack,
    RgbPlanes, INPUT_SIDE,
};
use thumbscope_core::features::hog::{gradient_field, hog_features, GRID_CELLS, ORIENTATION_BINS};
use thumbscope_core::features::spectral::{fourier_features, radial_spectrum_of_plane, RadialSpectrum, SpectralOptions};
use thumbscope_core::features::{FEATURE_COUNT, FEATURE_NAMES};
use thumbscope_core::imgcore::{lab_pixel, ImageBuffer, PlaneImage};
use thumbscope_core::stats::{compare_matrix, powerlaw_fit, powerlaw_fit_f64, spearman, welch_t, Observation};
use thumbscope_core::themes::{gini, tag_clusters, CategoricalDistribution, TaggingMethod, ThemeModel};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gini_anchors() -> Outcome {
    let g = |a: u64, b: u64| {
        let d: CategoricalDistribution = [("indoor", a), ("outdoor", b)].into_iter().collect();
        gini(&d).map_err(|e| e.to_string())
    };
    let (first, second) = (g(599, 575)?, g(931, 239)?);
    check(
        (first - 0.50).abs() <= 0.005 && (second - 0.33).abs() <= 0.005,
        format!("gini(599,575)={first:.4} gini(931,239)={second:.4} tol 0.005"),
    )
}

/// Real plane whose power spectrum falls as `r^-exponent`, random phases.
fn power_law_plane(side: usize, exponent: f64, rng: &mut ChaCha8Rng) -> PlaneImage {
    let mut buf = vec![Complex::new(0.0, 0.0); side * side];
    let freq = |i: usize| if i <= side / 2 { i as f64 } else { i as f64 - side as f64 };
    for v in 0..side {
        for u in 0..side {
            let r = freq(u).hypot(freq(v));
            if r > 0.0 {
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                buf[v * side + u] = Complex::from_polar(r.powf(-exponent / 2.0), phase);
            }
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(side);
    for row in buf.chunks_exact_mut(side) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); side];
    for x in 0..side {
        for y in 0..side {
            col[y] = buf[y * side + x];
        }
        fft.process(&mut col);
        for y in 0..side {
            buf[y * side + x] = col[y];
        }
    }
    PlaneImage::new(side, side, buf.iter().map(|c| c.re).collect())
}

fn spectral_slopes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SpectralOptions {
        resize: false,
        ..SpectralOptions::default()
    };
    let mut slopes = Vec::new();
    let mut ok = true;
    for exponent in [1.0, 2.0, 3.0] {
        let plane = power_law_plane(512, exponent, &mut rng);
        let spec = radial_spectrum_of_plane(&plane, &opts).map_err(|e| e.to_string())?;
        let slope = fourier_features(&spec, opts.fit_range).map_err(|e| e.to_string())?.slope;
        ok &= (slope + exponent).abs() <= 0.1;
        slopes.push(format!("{slope:.3}"));
    }
    let radii: Vec<f64> = (1..=256).map(f64::from).collect();
    let exact = RadialSpectrum {
        log_power: radii.iter().map(|r| 5.0 - 2.0 * r.log10()).collect(),
        radii,
    };
    let sigma = fourier_features(&exact, opts.fit_range).map_err(|e| e.to_string())?.sigma;
    ok &= sigma <= 1e-9;
    check(
        ok,
        format!("slopes [{}] for -1,-2,-3 tol 0.1; exact sigma {sigma:.1e} <= 1e-9", slopes.join(", ")),
    )
}

fn random_image(w: usize, h: usize, rng: &mut ChaCha8Rng) -> ImageBuffer {
    // Blocky noise so that filter responses vary across the pool grid.
    let block = rng.random_range(2..8usize);
    let cols = w.div_ceil(block);
    let palette: Vec<[u8; 3]> = (0..cols * h.div_ceil(block)).map(|_| rng.random()).collect();
    ImageBuffer::from_fn(w, h, |x, y| palette[(y / block) * cols + x / block])
}

fn symmetry_exactness() -> Outcome {
    let bank = FilterBank::default_bank();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_lr, mut worst_ud) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let w = 2 * rng.random_range(16..60usize);
        let h = 2 * rng.random_range(12..40usize);
        let base = random_image(w, h, &mut rng);
        let lr_img = ImageBuffer::from_fn(w, h, |x, y| base.get(x.min(w - 1 - x), y));
        let ud_img = ImageBuffer::from_fn(w, h, |x, y| base.get(x, y.min(h - 1 - y)));
        worst_lr = worst_lr.max((symmetry_features(&lr_img, &bank).symmetry_lr - 1.0).abs());
        worst_ud = worst_ud.max((symmetry_features(&ud_img, &bank).symmetry_ud - 1.0).abs());
    }
    check(
        worst_lr <= 1e-6 && worst_ud <= 1e-6,
        format!("100 images, max |lr-1| {worst_lr:.1e}, max |ud-1| {worst_ud:.1e}, tol 1e-6"),
    )
}

/// Brute-force HOG statistics straight from the definitions.
fn hog_oracle(img: &ImageBuffer) -> [f64; 3] {
    let (w, h) = (img.width(), img.height());
    let lab: Vec<[f64; 3]> = img.pixels().iter().map(|&p| lab_pixel(p)).collect();
    let at = |x: usize, y: usize, c: usize| lab[y * w + x][c];
    let mut hist = vec![[0.0f64; ORIENTATION_BINS]; GRID_CELLS * GRID_CELLS];
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let mut best = (0.0, 0.0, 0.0);
            for c in 0..3 {
                let gx = match x {
                    0 => at(1, y, c) - at(0, y, c),
                    _ if x == w - 1 => at(x, y, c) - at(x - 1, y, c),
                    _ => (at(x + 1, y, c) - at(x - 1, y, c)) / 2.0,
                };
                let gy = match y {
                    0 => at(x, 1, c) - at(x, 0, c),
                    _ if y == h - 1 => at(x, y, c) - at(x, y - 1, c),
                    _ => (at(x, y + 1, c) - at(x, y - 1, c)) / 2.0,
                };
                let g = (gx * gx + gy * gy).sqrt();
                if g > best.0 {
                    best = (g, gx, gy);
                }
            }
            let (g, gx, gy) = best;
            total += g;
            if g > 0.0 {
                let mut theta = gy.atan2(gx).to_degrees();
                while theta < 0.0 {
                    theta += 180.0;
                }
                while theta >= 180.0 {
                    theta -= 180.0;
                }
                let bin = ((theta / (180.0 / ORIENTATION_BINS as f64)).floor() as usize).min(ORIENTATION_BINS - 1);
                hist[(y * GRID_CELLS / h) * GRID_CELLS + x * GRID_CELLS / w][bin] += g;
            }
        }
    }
    let norm: Vec<Option<Vec<f64>>> = hist
        .iter()
        .map(|b| {
            let s: f64 = b.iter().sum();
            (s > 0.0).then(|| b.iter().map(|v| v / s).collect())
        })
        .collect();
    let n = GRID_CELLS as i64;
    let mut sim = 0.0;
    let mut aniso = 0.0;
    for r in 0..n {
        for c in 0..n {
            let here = &norm[(r * n + c) as usize];
            let mut acc = Vec::new();
            for (dr, dc) in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
                let (rr, cc) = (r + dr, c + dc);
                if (0..n).contains(&rr) && (0..n).contains(&cc) {
                    let other = &norm[(rr * n + cc) as usize];
                    acc.push(match (here, other) {
                        (None, None) => 1.0,
                        (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| x.min(*y)).sum(),
                        _ => 0.0,
                    });
                }
            }
            sim += acc.iter().sum::<f64>() / acc.len() as f64;
            if let Some(hh) = here {
                let m = hh.iter().sum::<f64>() / hh.len() as f64;
                aniso += (hh.iter().map(|v| (v - m).powi(2)).sum::<f64>() / hh.len() as f64).sqrt();
            }
        }
    }
    let cells = (GRID_CELLS * GRID_CELLS) as f64;
    [sim / cells, total / (w * h) as f64, aniso / cells]
}

/// Direct strided convolution, rectification and max pooling.
fn response_oracle(planes: &RgbPlanes, bank: &FilterBank) -> Vec<f64> {
    let k = bank.kernel_size();
    let origins = window_origins(INPUT_SIDE, k, bank.stride());
    let m = origins.len();
    let (pr, pc) = bank.pool_grid();
    let mut out = Vec::new();
    for f in 0..bank.len() {
        let mut map = vec![0.0f64; m * m];
        for (oy, &y0) in origins.iter().enumerate() {
            for (ox, &x0) in origins.iter().enumerate() {
                let mut s = 0.0;
                for y in 0..k {
                    for x in 0..k {
                        for c in 0..3 {
                            s += bank.weight(f, y, x, c) * planes.planes[c].get(x0 + x, y0 + y);
                        }
                    }
                }
                map[oy * m + ox] = s.max(0.0);
            }
        }
        for r in 0..pr {
            for c in 0..pc {
                let (r0, r1) = pool_span(r, pr, m);
                let (c0, c1) = pool_span(c, pc, m);
                let mut best = 0.0f64;
                for y in r0..r1 {
                    for x in c0..c1 {
                        best = best.max(map[y * m + x]);
                    }
                }
                out.push(best);
            }
        }
    }
    out
}

fn variance_two_pass(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64
}

fn rank_oracle(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let below = x.iter().filter(|&&o| o < v).count() as f64;
            let equal = x.iter().filter(|&&o| o == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn oracle_equivalence() -> Outcome {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    const FIXTURES: usize = 24;
    let mut errs = [0.0f64; 6];

    for _ in 0..FIXTURES {
        let img = random_image(rng.random_range(16..48), rng.random_range(16..48), &mut rng);
        let hog = hog_features(&gradient_field(&img).map_err(|e| e.to_string())?);
        let want = hog_oracle(&img);
        for (got, want) in [hog.self_similarity, hog.complexity, hog.anisotropy].iter().zip(want) {
            errs[0] = errs[0].max((got - want).abs() / want.abs().max(1.0));
        }
    }

    for _ in 0..FIXTURES {
        let k = 2 * rng.random_range(1..4usize) + 1;
        let n = rng.random_range(8..12usize);
        let weights: Vec<f64> = (0..n * k * k * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let bank = FilterBank::new(n, k, rng.random_range(3..6), (rng.random_range(2..6), rng.random_range(2..6)), weights)
            .map_err(|e| e.to_string())?;
        let planes = RgbPlanes {
            planes: std::array::from_fn(|_| {
                PlaneImage::new(INPUT_SIDE, INPUT_SIDE, (0..INPUT_SIDE * INPUT_SIDE).map(|_| rng.random()).collect())
            }),
        };
        let got = respond_planes(&planes, &bank);
        for (g, w) in got.values.iter().zip(response_oracle(&planes, &bank)) {
            errs[1] = errs[1].max((g - w).abs());
        }
    }

    for _ in 0..FIXTURES {
        let (maps, rows, cols) = (rng.random_range(8..20), rng.random_range(2..8), rng.random_range(2..8));
        let values: Vec<f64> = (0..maps * rows * cols).map(|_| rng.random_range(0.0..3.0)).collect();
        let stack = ResponseStack { maps, rows, cols, values };
        let got = sparseness_variability(&stack);
        let mut per_map: Vec<f64> = (0..maps).map(|m| variance_two_pass(stack.map(m))).collect();
        per_map.sort_by(f64::total_cmp);
        let median = if maps % 2 == 1 {
            per_map[maps / 2]
        } else {
            (per_map[maps / 2 - 1] + per_map[maps / 2]) / 2.0
        };
        errs[2] = errs[2]
            .max((got.sparseness - median).abs())
            .max((got.variability - variance_two_pass(&stack.values)).abs());
    }

    for _ in 0..FIXTURES {
        let n = rng.random_range(5..40);
        // Integer-valued draws force ties.
        let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..10u8))).collect();
        let y: Vec<f64> = x.iter().map(|v| v + f64::from(rng.random_range(0..6u8))).collect();
        if let Some(r) = spearman(&x, &y).map_err(|e| e.to_string())? {
            errs[3] = errs[3].max((r.rho - pearson(&rank_oracle(&x), &rank_oracle(&y))).abs());
        }
    }

    for _ in 0..FIXTURES {
        let a: Vec<f64> = (0..rng.random_range(3..30)).map(|_| rng.random_range(0.0..10.0)).collect();
        let b: Vec<f64> = (0..rng.random_range(3..30)).map(|_| rng.random_range(1.0..12.0)).collect();
        let r = welch_t(&a, &b).map_err(|e| e.to_string())?;
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
        };
        let (sa, sb) = (var(&a) / na, var(&b) / nb);
        let t = (mean(&a) - mean(&b)) / (sa + sb).sqrt();
        let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).map_err(|e| e.to_string())?.cdf(t.abs()));
        errs[4] = errs[4].max((r.t - t).abs()).max((r.df - df).abs());
        errs[5] = errs[5].max((r.p - p).abs());
    }

    let tol = [1e-9, 1e-5, 1e-12, 1e-12, 1e-9, 1e-9];
    check(
        errs.iter().zip(tol).all(|(e, t)| *e <= t),
        format!(
            "{FIXTURES} fixtures each; hog {:.1e}/1e-9 conv {:.1e}/1e-5 var {:.1e}/1e-12 rho {:.1e}/1e-12 welch t,df {:.1e}/1e-9 p {:.1e}/1e-9",
            errs[0], errs[1], errs[2], errs[3], errs[4], errs[5]
        ),
    )
}

fn tag_corpus(rng: &mut ChaCha8Rng, replicate: usize) -> (ThemeModel, BTreeMap<String, Vec<String>>, usize) {
    let k = rng.random_range(2..6);
    let vocab = rng.random_range(6..15);
    let images = rng.random_range(3 * k..40);
    let mut assignment = BTreeMap::new();
    let mut tags = BTreeMap::new();
    for i in 0..images {
        let cluster = if i < k { i } else { rng.random_range(0..k) };
        let mut list: Vec<String> = (0..vocab)
            .filter(|_| rng.random_bool(0.3))
            .map(|t| format!("t{t}"))
            .collect();
        list.push("everywhere".into());
        for copy in 0..replicate {
            let id = format!("img{i}-{copy}");
            assignment.insert(id.clone(), cluster);
            tags.insert(id, list.clone());
        }
    }
    let model = ThemeModel {
        k,
        assignment,
        centroids: vec![Vec::new(); k],
        silhouettes: BTreeMap::new(),
        tags: Vec::new(),
        tag_flags: Vec::new(),
        method: None,
    };
    (model, tags, k)
}

fn tfidf_contract() -> Outcome {
    let mut leaked = 0;
    let mut reordered = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, tags, _) = tag_corpus(&mut rng, 1);
        let base = tag_clusters(model, &tags, TaggingMethod::TfIdf, 0.5).map_err(|e| e.to_string())?;
        leaked += base.tags.iter().filter(|t| t.iter().any(|t| t == "everywhere")).count();

        let factor = 2 + (seed as usize % 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, tags, _) = tag_corpus(&mut rng, factor);
        let scaled = tag_clusters(model, &tags, TaggingMethod::TfIdf, 0.5).map_err(|e| e.to_string())?;
        if scaled.tags != base.tags {
            reordered += 1;
        }
    }
    check(
        leaked == 0 && reordered == 0,
        format!("100 corpora: ubiquitous tag in top 5 {leaked} times, rankings changed by tf scaling {reordered} times"),
    )
}

fn planted_effect(dir: &Path) -> Outcome {
    let spec = SynthSpec {
        images: 200,
        width: 320,
        height: 180,
        events: vec!["covid 19".into()],
        themes_per_event: 3,
        luminance_shift: 20.0,
        seed: 5,
        ..SynthSpec::default()
    };
    let planted = generate(dir, &spec).map_err(|e| e.to_string())?;
    let config = RunConfig {
        output_dir: dir.to_path_buf(),
        ..RunConfig::default()
    };
    let started = Instant::now();
    cmd_extract(&config).map_err(|e| e.to_string())?;
    let themes = cmd_themes(&config).map_err(|e| e.to_string())?;
    let matrix = cmd_compare(&config).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();

    let model = &themes.models["covid 19"];
    let mut pairs: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in &planted {
        pairs.entry(p.theme).or_default().insert(model.assignment[&p.image_id]);
    }
    let clusters: BTreeSet<usize> = pairs.values().flatten().copied().collect();
    let pure = pairs.values().all(|c| c.len() == 1) && clusters.len() == pairs.len();

    let mut lum_ok = 0;
    for theme in &matrix.themes {
        let cell = matrix.cell("luminance", theme).ok_or("missing luminance cell")?;
        if cell.significant && cell.larger_group.as_deref() == Some("cn") {
            lum_ok += 1;
        }
    }
    check(
        model.k == 3 && pure && lum_ok == matrix.themes.len() && elapsed < Duration::from_secs(120),
        format!(
            "k={} purity {} luminance significant cn>us in {lum_ok}/{} themes, pipeline {:.1}s < 120s",
            model.k,
            if pure { "100%" } else { "<100%" },
            matrix.themes.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn null_calibration() -> Outcome {
    let themes = ["t0", "t1", "t2"];
    let (mut significant, mut cells) = (0usize, 0usize);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut rows: Vec<(&str, &str, [f64; FEATURE_COUNT])> = Vec::new();
        for theme in themes {
            for group in ["a", "b"] {
                for _ in 0..30 {
                    // Same per-feature distribution in both groups.
                    let f = std::array::from_fn(|j| {
                        let n = Normal::new(j as f64, 1.0 + j as f64 * 0.1).expect("valid");
                        n.sample(&mut rng)
                    });
                    rows.push((group, theme, f));
                }
            }
        }
        let obs: Vec<Observation> = rows
            .iter()
            .map(|(g, t, f)| Observation {
                group: g,
                theme: t,
                features: f,
            })
            .collect();
        let m = compare_matrix(&obs, None, 0.05).map_err(|e| e.to_string())?;
        significant += m.significant_count();
        cells += m.cells.len();
    }
    let frac = significant as f64 / cells as f64;
    check(
        (0.02..=0.09).contains(&frac),
        format!("{significant}/{cells} cells significant = {frac:.4}, window [0.02, 0.09]"),
    )
}

fn power_law_anchor() -> Outcome {
    let exact: Vec<f64> = (1..=1000).map(|r| 1e6 * f64::from(r).powf(-1.5)).collect();
    let fit = powerlaw_fit_f64(&exact).map_err(|e| e.to_string())?;
    let law = |e: f64| (1..=300).map(|r| (1e6 * f64::from(r).powf(-e)).round() as u64).collect::<Vec<_>>();
    let shallow = powerlaw_fit(&law(1.0)).map_err(|e| e.to_string())?.slope;
    let steep = powerlaw_fit(&law(1.6)).map_err(|e| e.to_string())?.slope;
    check(
        (fit.slope + 1.5).abs() <= 1e-9 && steep < shallow,
        format!(
            "slope {:.12} vs -1.5 tol 1e-9; steeper {steep:.3} < shallower {shallow:.3}",
            fit.slope
        ),
    )
}

fn csv_snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                out.insert(path.clone(), fs::read(&path).unwrap_or_default());
            }
        }
    }
    out
}

fn run_all(config: &RunConfig) -> thumbscope_cli::Result<()> {
    cmd_extract(config)?;
    cmd_themes(config)?;
    cmd_compare(config)?;
    cmd_performance(config)?;
    cmd_temporal(config)?;
    cmd_inspect(config, "luminance", 5)?;
    Ok(())
}

fn determinism(dir: &Path) -> Outcome {
    let config = RunConfig {
        output_dir: dir.to_path_buf(),
        seed: 42,
        ..RunConfig::default()
    };
    let spec = SynthSpec {
        images: 60,
        width: 96,
        height: 54,
        seed: 42,
        ..SynthSpec::default()
    };
    cmd_ingest_synthetic(&config, &spec).map_err(|e| e.to_string())?;
    run_all(&config).map_err(|e| e.to_string())?;
    let first = csv_snapshot(dir);
    cmd_ingest_synthetic(&config, &spec).map_err(|e| e.to_string())?;
    run_all(&config).map_err(|e| e.to_string())?;
    let second = csv_snapshot(dir);
    let differing: Vec<String> = first
        .iter()
        .filter(|(p, bytes)| second.get(*p) != Some(bytes))
        .map(|(p, _)| p.strip_prefix(dir).unwrap_or(p).display().to_string())
        .collect();
    check(
        !first.is_empty() && differing.is_empty() && first.len() == second.len(),
        format!("{} CSVs compared, {} differ {:?}", first.len(), differing.len(), differing),
    )
}

fn main() -> ExitCode {
    let planted_dir = tempfile::tempdir().expect("tempdir");
    let determinism_dir = tempfile::tempdir().expect("tempdir");
    assert_eq!(FEATURE_NAMES.len(), FEATURE_COUNT);

    let criteria: Vec<Criterion> = vec![
        ("gini anchors", Duration::from_millis(1), Box::new(gini_anchors)),
        ("spectral slope recovery", Duration::from_secs(10), Box::new(spectral_slopes)),
        ("symmetry exactness", Duration::from_secs(30), Box::new(symmetry_exactness)),
        ("oracle equivalence", Duration::from_secs(60), Box::new(oracle_equivalence)),
        ("tf-idf tagging contract", Duration::from_secs(5), Box::new(tfidf_contract)),
        ("planted effect end-to-end", Duration::from_secs(120), Box::new(|| planted_effect(planted_dir.path()))),
        ("null calibration", Duration::from_secs(60), Box::new(null_calibration)),
        ("power-law anchor", Duration::from_secs(1), Box::new(power_law_anchor)),
        ("determinism", Duration::from_secs(120), Box::new(|| determinism(determinism_dir.path()))),
    ];

    let mut failed = 0;
    for (name, budget, run) in &criteria {
        let started = Instant::now();
        let outcome = run();
        let took = started.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {name}: {detail} [{:.3}s, budget {:.3}s]", took.as_secs_f64(), budget.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
