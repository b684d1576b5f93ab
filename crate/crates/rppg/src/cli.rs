//! The `rppg` command line. Every subcommand writes its results under `--out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rppg_core::exec::Executor;
use rppg_core::imaging::{FrameSequence, RoiMask};
use rppg_core::pad::{
    svm_train, video_verdict, CvReport, PadSample, SvmParams, LABEL_ATTACK, LABEL_GENUINE,
};
use rppg_core::render::{render_heatmap, render_timeline_plot, Colormap, HeatmapStyle, RangePolicy};
use rppg_core::scales::{
    analyze_global, analyze_local, analyze_regions, detect_reperfusion, LocalOptions, MetricsTimeline, Preprocess,
    ValueMap,
};
use rppg_core::signal::AnalysisConfig;
use rppg_core::synth::{SynthGenerator, SynthSpec};
use serde::Serialize;

use crate::exec::RayonExecutor;
use crate::formats::{
    load_model, read_features_csv, read_map, read_timeline_csv, save_model, write_features_csv, write_map,
    write_timeline_csv, write_truth,
};
use crate::io::{
    load_frame_sequence, load_landmarks, load_mask, read_json_file, save_png, write_bytes, write_frame_dir, write_json,
    write_raw_stream,
};
use crate::{Error, Result};

const PLOT_SIZE: (usize, usize) = (480, 160);

#[derive(Debug, Parser)]
#[command(name = "rppg", version, about = "Multi-scale rPPG perfusion analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct VideoArgs {
    /// Frame directory (with meta.json) or raw RGB8 stream.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON file overriding analysis settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Restrict averaging to skin-coloured pixels.
    #[arg(long)]
    pub skin_seg: bool,
    /// Translation-only motion compensation against the first frame.
    #[arg(long)]
    pub register: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sliding-window metrics of an ROI average.
    AnalyzeGlobal {
        #[command(flatten)]
        video: VideoArgs,
        #[arg(long)]
        roi: PathBuf,
        /// Reference-region mask.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Heart rate in BPM from an external sensor, used when no reference mask is given.
        #[arg(long)]
        external_hr: Option<f64>,
    },
    /// Metrics of five facial regions derived from 68 landmarks.
    AnalyzeRegions {
        #[command(flatten)]
        video: VideoArgs,
        #[arg(long)]
        landmarks: PathBuf,
        /// Also export a feature table with this label (0 genuine, 1 attack).
        #[arg(long)]
        pad_label: Option<u8>,
        /// Subject identifier written to the feature table.
        #[arg(long, default_value = "subject")]
        subject: String,
    },
    /// Per-pixel maps on a downscaled copy of the video.
    AnalyzeLocal {
        #[command(flatten)]
        video: VideoArgs,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long)]
        external_hr: Option<f64>,
        /// Pixel count the pyramid level should approach.
        #[arg(long, default_value_t = 10_000)]
        target_px: usize,
    },
    /// Generates a synthetic pulsatile video with ground truth.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed of the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Write a raw stream `video.rgb` instead of PNG frames.
        #[arg(long)]
        raw: bool,
    },
    /// Trains the cubic SVM with subject-disjoint cross-validation.
    PadTrain {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classifies feature rows with a trained model.
    PadClassify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Renders a map file as a heatmap or a timeline CSV as a PI plot.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fixed value range `MIN,MAX` instead of the data range.
        #[arg(long, value_parser = parse_range)]
        range: Option<(f64, f64)>,
        #[arg(long, default_value = "blue-white-red")]
        colormap: String,
        /// Nearest-neighbour upscaling factor.
        #[arg(long, default_value_t = 4)]
        scale: usize,
        /// Mask outlined on the heatmap (map resolution or resampled to it).
        #[arg(long)]
        contour: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected MIN,MAX")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("MIN must be below MAX".into());
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command; returns
/// the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { crate::error::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let exec = RayonExecutor::new(cli.threads);
    match &cli.command {
        Command::AnalyzeGlobal {
            video,
            roi,
            reference,
            external_hr,
        } => cmd_global(video, roi, reference.as_deref(), *external_hr, &exec),
        Command::AnalyzeRegions {
            video,
            landmarks,
            pad_label,
            subject,
        } => cmd_regions(video, landmarks, *pad_label, subject, &exec),
        Command::AnalyzeLocal {
            video,
            reference,
            external_hr,
            target_px,
        } => cmd_local(video, reference.as_deref(), *external_hr, *target_px, &exec),
        Command::Synth { spec, out, seed, raw } => cmd_synth(spec, out, *seed, *raw, &exec),
        Command::PadTrain { features, folds, out } => cmd_pad_train(features, *folds, out, &exec),
        Command::PadClassify { model, features, out } => cmd_pad_classify(model, features, out),
        Command::Render {
            input,
            out,
            range,
            colormap,
            scale,
            contour,
        } => cmd_render(input, out, *range, colormap, *scale, contour.as_deref()),
    }
}

fn load_config(path: Option<&Path>) -> Result<AnalysisConfig> {
    let cfg: AnalysisConfig = match path {
        Some(p) => read_json_file(p)?,
        None => AnalysisConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn hz(bpm: Option<f64>) -> Result<Option<f64>> {
    match bpm {
        Some(b) if !(b.is_finite() && b > 0.0) => Err(Error::Usage(format!("--external-hr must be positive, got {b}"))),
        other => Ok(other.map(|b| b / 60.0)),
    }
}

fn mask_for(path: &Path, seq: &FrameSequence) -> Result<RoiMask> {
    let m = load_mask(path)?;
    if m.dims() != (seq.width, seq.height) {
        return Err(Error::Format {
            path: path.into(),
            reason: format!("mask is {:?}, frames are {:?}", m.dims(), (seq.width, seq.height)),
        });
    }
    Ok(m)
}

#[derive(Serialize)]
struct InputSummary {
    width: usize,
    height: usize,
    fps: f64,
    frames: usize,
}

impl InputSummary {
    fn of(seq: &FrameSequence) -> Self {
        Self {
            width: seq.width,
            height: seq.height,
            fps: seq.fs,
            frames: seq.len(),
        }
    }
}

#[derive(Serialize)]
struct TimelineSummary {
    windows: usize,
    mean_bpm: Option<f64>,
    mean_snr_db: Option<f64>,
    mean_magnitude: Option<f64>,
    mean_rho_ref: Option<f64>,
    /// `t_start` of the window where the normalized PI peaks.
    pi_peak_t_start: Option<f64>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

impl TimelineSummary {
    fn of(tl: &MetricsTimeline) -> Self {
        Self {
            windows: tl.len(),
            mean_bpm: mean(tl.entries.iter().map(|e| e.bpm)),
            mean_snr_db: mean(tl.entries.iter().map(|e| e.snr_db)),
            mean_magnitude: mean(tl.entries.iter().map(|e| e.magnitude)),
            mean_rho_ref: mean(tl.entries.iter().filter_map(|e| e.rho_ref)),
            pi_peak_t_start: detect_reperfusion(tl).map(|ev| ev.t_peak),
        }
    }
}

fn write_timeline_outputs(out: &Path, stem: &str, tl: &MetricsTimeline) -> Result<()> {
    write_timeline_csv(&out.join(format!("{stem}.csv")), tl)?;
    if let Some(ev) = detect_reperfusion(tl) {
        let img = render_timeline_plot(&ev.normalized_pi, PLOT_SIZE.0, PLOT_SIZE.1)?;
        save_png(&out.join(format!("{stem}_pi.png")), &img)?;
    }
    Ok(())
}

fn registrations_csv(out: &Path, regs: &[rppg_core::imaging::Registration]) -> Result<()> {
    let mut s = String::from("frame,dx,dy,peak_ratio,low_confidence\n");
    for (i, r) in regs.iter().enumerate() {
        s.push_str(&format!("{i},{},{},{},{}\n", r.dx, r.dy, r.peak_ratio, r.low_confidence));
    }
    write_bytes(&out.join("registration.csv"), s.as_bytes())
}

fn preprocess(v: &VideoArgs) -> Preprocess {
    Preprocess {
        register: v.register,
        skin_seg: v.skin_seg,
    }
}

fn cmd_global<E: Executor>(
    v: &VideoArgs,
    roi: &Path,
    reference: Option<&Path>,
    external_bpm: Option<f64>,
    exec: &E,
) -> Result<()> {
    let cfg = load_config(v.config.as_deref())?;
    let f_ext = hz(external_bpm)?;
    let seq = load_frame_sequence(&v.input, exec)?;
    let roi = mask_for(roi, &seq)?;
    let reference = reference.map(|p| mask_for(p, &seq)).transpose()?;
    let g = analyze_global(&seq, &roi, reference.as_ref(), &cfg, f_ext, preprocess(v), exec)?;

    write_timeline_outputs(&v.out, "roi", &g.roi)?;
    if let Some(r) = &g.reference {
        write_timeline_outputs(&v.out, "reference", r)?;
    }
    if v.register {
        registrations_csv(&v.out, &g.registrations)?;
    }
    #[derive(Serialize)]
    struct Summary {
        input: InputSummary,
        config: AnalysisConfig,
        correlation_reference: &'static str,
        roi: TimelineSummary,
        reference: Option<TimelineSummary>,
        low_confidence_frames: usize,
    }
    write_json(
        &v.out.join("summary.json"),
        &Summary {
            input: InputSummary::of(&seq),
            config: cfg,
            correlation_reference: if reference.is_some() { "region" } else { "external-hr" },
            roi: TimelineSummary::of(&g.roi),
            reference: g.reference.as_ref().map(TimelineSummary::of),
            low_confidence_frames: g.registrations.iter().filter(|r| r.low_confidence).count(),
        },
    )
}

fn cmd_regions<E: Executor>(v: &VideoArgs, landmarks: &Path, label: Option<u8>, subject: &str, exec: &E) -> Result<()> {
    if let Some(l) = label {
        if l != LABEL_GENUINE && l != LABEL_ATTACK {
            return Err(Error::Usage(format!("--pad-label must be 0 or 1, got {l}")));
        }
    }
    let cfg = load_config(v.config.as_deref())?;
    let seq = load_frame_sequence(&v.input, exec)?;
    let lm = load_landmarks(landmarks, seq.width, seq.height)?;
    let ra = analyze_regions(&seq, &lm, &cfg, preprocess(v), exec)?;

    for (name, tl) in &ra.regions {
        write_timeline_outputs(&v.out.join("regions"), name.as_str(), tl)?;
    }
    if v.register {
        registrations_csv(&v.out, &ra.registrations)?;
    }
    if let Some(l) = label {
        let rows = rppg_core::pad::features_from_analysis(&ra, l, subject);
        write_features_csv(&v.out.join("features.csv"), &rows)?;
    }
    #[derive(Serialize)]
    struct Region {
        name: &'static str,
        polygon: Vec<(f64, f64)>,
        timeline: TimelineSummary,
    }
    #[derive(Serialize)]
    struct Summary {
        input: InputSummary,
        config: AnalysisConfig,
        reference_region: &'static str,
        regions: Vec<Region>,
    }
    let regions = ra
        .regions
        .iter()
        .map(|(name, tl)| Region {
            name: name.as_str(),
            polygon: ra
                .specs
                .iter()
                .find(|s| s.name == *name)
                .map(|s| s.polygon.clone())
                .unwrap_or_default(),
            timeline: TimelineSummary::of(tl),
        })
        .collect();
    write_json(
        &v.out.join("summary.json"),
        &Summary {
            input: InputSummary::of(&seq),
            config: cfg,
            reference_region: ra.reference.as_str(),
            regions,
        },
    )
}

fn cmd_local<E: Executor>(
    v: &VideoArgs,
    reference: Option<&Path>,
    external_bpm: Option<f64>,
    target_px: usize,
    exec: &E,
) -> Result<()> {
    if v.register || v.skin_seg {
        log::warn!("--register and --skin-seg apply to region averages and are ignored by analyze-local");
    }
    if target_px == 0 {
        return Err(Error::Usage("--target-px must be positive".into()));
    }
    let cfg = load_config(v.config.as_deref())?;
    let f_ext = hz(external_bpm)?;
    let seq = load_frame_sequence(&v.input, exec)?;
    let reference = reference.map(|p| mask_for(p, &seq)).transpose()?;
    let (maps, lvl) = analyze_local(&seq, reference.as_ref(), f_ext, &cfg, LocalOptions { target_px }, exec)?;

    let contour = reference.as_ref().map(|r| r.resample(lvl.width, lvl.height));
    let style = HeatmapStyle {
        scale: 4,
        ..HeatmapStyle::default()
    };
    let dir = v.out.join("maps");
    #[derive(Serialize)]
    struct WindowSummary {
        window: usize,
        t_start: f64,
        f_hr_global: f64,
        defined_pixels: usize,
        mean_magnitude: Option<f64>,
        mean_snr_db: Option<f64>,
        mean_rho_ref: Option<f64>,
        median_bpm: Option<f64>,
    }
    let mut windows = Vec::with_capacity(maps.len());
    for (k, set) in maps.iter().enumerate() {
        for (name, map) in set.named_maps() {
            write_map(&dir.join(format!("w{k:03}_{name}.rpmap")), name, map)?;
            let img = render_heatmap(map, &style, contour.as_ref())?;
            save_png(&dir.join(format!("w{k:03}_{name}.png")), &img)?;
        }
        windows.push(WindowSummary {
            window: k,
            t_start: set.t_start,
            f_hr_global: set.f_hr_global,
            defined_pixels: set.magnitude.defined().iter().filter(|&&d| d).count(),
            mean_magnitude: set.magnitude.mean(None),
            mean_snr_db: set.snr_db.mean(None),
            mean_rho_ref: set.rho_ref.mean(None),
            median_bpm: set.bpm.median(),
        });
    }
    #[derive(Serialize)]
    struct Summary {
        input: InputSummary,
        config: AnalysisConfig,
        pyramid_level: usize,
        map_width: usize,
        map_height: usize,
        windows: Vec<WindowSummary>,
    }
    write_json(
        &v.out.join("summary.json"),
        &Summary {
            input: InputSummary::of(&seq),
            config: cfg,
            pyramid_level: lvl.level,
            map_width: lvl.width,
            map_height: lvl.height,
            windows,
        },
    )
}

fn cmd_synth<E: Executor>(spec_path: &Path, out: &Path, seed: Option<u64>, raw: bool, exec: &E) -> Result<()> {
    let mut spec: SynthSpec = read_json_file(spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let gen = SynthGenerator::new(spec.clone())?;
    let frames = exec.map(gen.frame_count(), |i| gen.frame(i));
    let seq = FrameSequence::new(spec.fs, frames)?;
    if raw {
        write_raw_stream(&out.join("video.rgb"), &seq)?;
    } else {
        write_frame_dir(out, &seq, exec)?;
    }
    write_truth(out, &spec, &gen.truth())
}

fn cmd_pad_train<E: Executor>(features: &Path, folds: usize, out: &Path, exec: &E) -> Result<()> {
    let samples = read_features_csv(features)?;
    let (model, report) = svm_train(&samples, folds, &SvmParams::default(), exec)?;
    save_model(&out.join("model.json"), &model)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        samples: usize,
        genuine: usize,
        attack: usize,
        support_vectors: usize,
        cross_validation: &'a CvReport,
        pooled_accuracy: f64,
    }
    let attack = samples.iter().filter(|s| s.label == LABEL_ATTACK).count();
    write_json(
        &out.join("cv_report.json"),
        &Summary {
            samples: samples.len(),
            genuine: samples.len() - attack,
            attack,
            support_vectors: model.support_vectors.len(),
            cross_validation: &report,
            pooled_accuracy: report.confusion.accuracy(),
        },
    )
}

fn cmd_pad_classify(model: &Path, features: &Path, out: &Path) -> Result<()> {
    let model = load_model(model)?;
    let samples: Vec<PadSample> = read_features_csv(features)?;
    let mut s = String::from("subject_id,region,window,label,decision\n");
    let mut per_subject: std::collections::BTreeMap<&str, Vec<u8>> = Default::default();
    let mut conf = rppg_core::pad::Confusion::default();
    for row in &samples {
        let (label, d) = model.predict(&row.features)?;
        s.push_str(&format!(
            "{},{},{},{label},{d}\n",
            row.subject_id,
            row.region.as_str(),
            row.window_index
        ));
        per_subject.entry(&row.subject_id).or_default().push(label);
        conf.add(row.label, label);
    }
    write_bytes(&out.join("predictions.csv"), s.as_bytes())?;
    #[derive(Serialize)]
    struct Verdict<'a> {
        subject_id: &'a str,
        samples: usize,
        attack_samples: usize,
        verdict: u8,
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        samples: usize,
        /// Agreement with the labels in the feature file.
        confusion: rppg_core::pad::Confusion,
        accuracy: f64,
        videos: Vec<Verdict<'a>>,
    }
    let videos = per_subject
        .iter()
        .map(|(id, labels)| Verdict {
            subject_id: id,
            samples: labels.len(),
            attack_samples: labels.iter().filter(|&&l| l == LABEL_ATTACK).count(),
            verdict: video_verdict(labels),
        })
        .collect();
    write_json(
        &out.join("summary.json"),
        &Summary {
            samples: samples.len(),
            confusion: conf,
            accuracy: conf.accuracy(),
            videos,
        },
    )
}

fn cmd_render(
    input: &Path,
    out: &Path,
    range: Option<(f64, f64)>,
    colormap: &str,
    scale: usize,
    contour: Option<&Path>,
) -> Result<()> {
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Usage(format!("cannot name output for {}", input.display())))?;
    if input.extension().and_then(|e| e.to_str()) == Some("csv") {
        let tl = read_timeline_csv(input)?;
        let ev = detect_reperfusion(&tl)
            .ok_or_else(|| Error::format(input, "timeline has no perfusion index values"))?;
        let img = render_timeline_plot(&ev.normalized_pi, PLOT_SIZE.0, PLOT_SIZE.1)?;
        return save_png(&out.join(format!("{stem}_pi.png")), &img);
    }
    let colormap = Colormap::parse(colormap).ok_or_else(|| Error::Usage(format!("unknown colormap `{colormap}`")))?;
    let (_, map): (String, ValueMap) = read_map(input)?;
    let contour = contour
        .map(|p| load_mask(p).map(|m| m.resample(map.width, map.height)))
        .transpose()?;
    let style = HeatmapStyle {
        range: range.map_or(RangePolicy::Auto, |(lo, hi)| RangePolicy::Fixed(lo, hi)),
        colormap,
        scale,
    };
    let img = render_heatmap(&map, &style, contour.as_ref())?;
    save_png(&out.join(format!("{stem}.png")), &img)
}
