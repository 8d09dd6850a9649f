//! Synthetic corpora with planted structure, for offline runs and tests.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;
use thumbscope_corpus::{save_manifest, Manifest, Provenance, ThumbnailRecord};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub images: usize,
    pub width: usize,
    pub height: usize,
    /// First group receives the luminance shift, the higher like-rate and
    /// the shallower view curve.
    pub groups: [String; 2],
    pub events: Vec<String>,
    pub themes_per_event: usize,
    /// Added to the L* of every group-A pixel.
    pub luminance_shift: f64,
    pub embedding_dim: usize,
    pub blob_spread: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            images: 120,
            width: 160,
            height: 90,
            groups: ["cn".into(), "us".into()],
            events: vec!["covid 19".into(), "ukraine war".into()],
            themes_per_event: 3,
            luminance_shift: 0.0,
            embedding_dim: 16,
            blob_spread: 0.05,
            seed: 0,
        }
    }
}

/// Where each synthetic image came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedImage {
    pub image_id: String,
    pub event: String,
    pub group: String,
    pub theme: usize,
}

const THEME_WORDS: [[&str; 6]; 4] = [
    ["mask", "hospital", "doctor", "vaccine", "nurse", "lab"],
    ["tank", "soldier", "smoke", "ruins", "helmet", "convoy"],
    ["podium", "flag", "suit", "microphone", "crowd", "stage"],
    ["map", "chart", "studio", "anchor", "screen", "desk"],
];

fn lab_f_inv(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA {
        t * t * t
    } else {
        3.0 * DELTA * DELTA * (t - 4.0 / 29.0)
    }
}

/// Inverse of the library's sRGB to Lab conversion, clamped to the gamut.
pub fn lab_to_srgb(lab: [f64; 3]) -> [u8; 3] {
    const XYZ_TO_RGB: [[f64; 3]; 3] = [
        [3.240_454_2, -1.537_138_5, -0.498_531_4],
        [-0.969_266_0, 1.876_010_8, 0.041_556_0],
        [0.055_643_4, -0.204_025_9, 1.057_225_2],
    ];
    const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let xyz = [WHITE[0] * lab_f_inv(fx), WHITE[1] * lab_f_inv(fy), WHITE[2] * lab_f_inv(fz)];
    let mut out = [0u8; 3];
    for (o, row) in out.iter_mut().zip(XYZ_TO_RGB) {
        let lin = (row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2]).clamp(0.0, 1.0);
        let c = if lin <= 0.003_130_8 {
            12.92 * lin
        } else {
            1.055 * lin.powf(1.0 / 2.4) - 0.055
        };
        *o = (c * 255.0).round().clamp(0.0, 255.0) as u8;
    }
    out
}

fn render(spec: &SynthSpec, theme: usize, shifted: bool, rng: &mut ChaCha8Rng) -> image::RgbImage {
    let base = rng.random_range(38.0..52.0) + if shifted { spec.luminance_shift } else { 0.0 };
    let angle = std::f64::consts::TAU * theme as f64 / spec.themes_per_event.max(1) as f64;
    let (a0, b0) = (18.0 * angle.cos(), 18.0 * angle.sin());
    let waves: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.02..0.3),
                rng.random_range(0.02..0.3),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let mut img = image::RgbImage::new(spec.width as u32, spec.height as u32);
    for (x, y, px) in img.enumerate_pixels_mut() {
        let texture: f64 = waves
            .iter()
            .map(|(fx, fy, ph)| 4.0 * (fx * x as f64 + fy * y as f64 + ph).sin())
            .sum();
        let l = (base + texture + rng.random_range(-2.0..2.0)).clamp(22.0, 95.0);
        px.0 = lab_to_srgb([l, a0 + rng.random_range(-3.0..3.0), b0 + rng.random_range(-3.0..3.0)]);
    }
    img
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }).collect()
}

/// Writes manifest, PNG thumbnails and the three sidecars into `dir`.
pub fn generate(dir: &Path, spec: &SynthSpec) -> Result<Vec<PlantedImage>> {
    let thumbs = dir.join("thumbnails");
    fs::create_dir_all(&thumbs)?;
    let n_events = spec.events.len().max(1);
    let noise = Normal::new(0.0, spec.blob_spread.max(0.0)).expect("finite spread");

    let mut planted = Vec::with_capacity(spec.images);
    let mut records = Vec::with_capacity(spec.images);
    let mut embeddings = BufWriter::new(fs::File::create(dir.join("embeddings.jsonl"))?);
    let mut tags = BufWriter::new(fs::File::create(dir.join("tags.jsonl"))?);
    let mut annotations = BufWriter::new(fs::File::create(dir.join("annotations.jsonl"))?);

    for i in 0..spec.images {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i as u64);
        let e = i % n_events;
        let g = (i / n_events) % 2;
        let theme = (i / (2 * n_events)) % spec.themes_per_event;
        let event = spec.events.get(e).cloned().unwrap_or_else(|| "event".into());
        let group = spec.groups[g].clone();
        let id = format!("syn-{i:04}");

        let img = render(spec, theme, g == 0, &mut rng);
        let file = format!("{id}.png");
        img.save(thumbs.join(&file)).map_err(|e| std::io::Error::other(e.to_string()))?;

        // Theme 0 of the first event is concentrated in April 2022.
        let month = if e == 0 && theme == 0 { 4 } else { rng.random_range(1..=12) };
        let day = rng.random_range(1..=28);
        let published_at = Utc.with_ymd_and_hms(2022, month, day, 12, 0, 0).single().expect("valid date");

        records.push(ThumbnailRecord {
            image_id: id.clone(),
            channel: format!("{group}-channel-{}", i % 2),
            group: group.clone(),
            event: event.clone(),
            published_at,
            views: 0,
            likes: 0,
            comments: 0,
            thumbnail_path: Some(format!("thumbnails/{file}")),
            url: format!("synthetic://{id}"),
        });

        let mut vector = vec![0.0; spec.embedding_dim];
        vector[(e * spec.themes_per_event + theme) % spec.embedding_dim] = 1.0;
        for v in vector.iter_mut() {
            *v += noise.sample(&mut rng);
        }
        writeln!(embeddings, "{}", json!({"image_id": id, "embedding": vector}))?;

        let words = &THEME_WORDS[(e * spec.themes_per_event + theme) % THEME_WORDS.len()];
        let mut image_tags: Vec<String> = words
            .iter()
            .filter(|_| rng.random_bool(0.7))
            .map(|w| format!("{w}-{}", slug(&event)))
            .collect();
        if rng.random_bool(0.9) {
            image_tags.push("man".into());
        }
        writeln!(tags, "{}", json!({"image_id": id, "tags": image_tags}))?;

        // Position of this image among its (event, theme) peers.
        let j = i / (2 * n_events * spec.themes_per_event) * 2 + g;
        let indoor = if theme == 0 { j % 20 != 19 } else { j % 2 == 0 };
        let scale = ["close", "medium", "long"][rng.random_range(0..3)];
        writeln!(
            annotations,
            "{}",
            json!({
                "image_id": id,
                "shot_scale": scale,
                "setting": if indoor { "indoor" } else { "outdoor" },
                "objects": {"person": rng.random_range(0..4u32)}
            })
        )?;

        planted.push(PlantedImage {
            image_id: id,
            event,
            group,
            theme,
        });
    }
    embeddings.flush()?;
    tags.flush()?;
    annotations.flush()?;

    // Views follow an exact power law over rank within each (group, event);
    // the second group's curve is steeper and its like-rate half as large.
    for g in 0..2 {
        for e in 0..n_events {
            let exponent = if g == 0 { 1.0 } else { 1.6 };
            let like_rate = if g == 0 { 0.04 } else { 0.02 };
            let members = (0..spec.images).filter(|i| i % n_events == e && (i / n_events) % 2 == g);
            for (rank, i) in members.enumerate() {
                let views = (1e6 * ((rank + 1) as f64).powf(-exponent)).round().max(1.0);
                let r = &mut records[i];
                r.views = views as u64;
                r.likes = (views * like_rate).round() as u64;
                r.comments = (views * 0.002).round() as u64;
            }
        }
    }

    let manifest = Manifest {
        provenance: Provenance {
            query: format!("synthetic corpus, seed {}", spec.seed),
            channel_ids: Vec::new(),
            published_after: None,
            retrieved_at: None,
        },
        records,
    };
    save_manifest(&dir.join("manifest.jsonl"), &manifest)?;
    Ok(planted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use thumbscope_core::imgcore::lab_pixel;

    #[test]
    fn lab_inverse_round_trips() {
        for &(l, a, b) in &[(50.0, 0.0, 0.0), (70.0, 15.0, -10.0), (40.0, -12.0, 18.0)] {
            let back = lab_pixel(lab_to_srgb([l, a, b]));
            assert!((back[0] - l).abs() < 0.5, "{back:?}");
            assert!((back[1] - a).abs() < 1.5 && (back[2] - b).abs() < 1.5, "{back:?}");
        }
    }
}
