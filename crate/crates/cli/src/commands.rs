//! Implementations of the CLI subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use tda_core::complex::{
    alpha_filtration, clique_filtration, cubical_filtration, rips_filtration, Filtration,
};
use tda_core::functions::{Grid1D, ImageParams};
use tda_core::geometry::{
    distance_matrix, generate_shape, load_point_cloud_csv, parse_pdb_ca, PointCloud, ShapeKind,
    ShapeSpec, HELIX_DEFAULT_RADIUS,
};
use tda_core::kernels::{gram_matrix, GramMatrix, KernelConfig};
use tda_core::learn::{
    default_c_grid, default_gamma_grid, evaluate, grid_search_cv, ovr_train, EvalReport,
    GridSearchResult, OvrModel, SearchKernel, SvmConfig, SvmInput, SvmKernel,
};
use tda_core::metrics::{
    bottleneck, fisher_information_metric, sliced_wasserstein, wasserstein, FimParams, SwParams,
};
use tda_core::numfmt;
use tda_core::persistence::{diagrams, PersistenceDiagramSet};
use tda_core::vectorize::{
    algebraic_coordinates, barcode_statistics, barcode_statistics_names, binned_features,
    fit_codebook, fit_gmm, pbow, pfv, pvlad, signature_layer, tropical_coordinates, BinKind,
    BinningSpec, FeatureMatrix, Preprocessor,
};

use crate::formats::{self, ModelFile};
use crate::svg;
use crate::{
    BarcodeArgs, ClassifyArgs, ClassifyKernelArg, ComplexArg, DistArgs, DistMethodArg, FitArgs,
    GenArgs, GramArgs, KernelArg, MethodArg, ModelArg, PlotArgs, PlotKindArg, ShapeArg,
    VectorizeArgs,
};

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn read_diagram(path: &Path) -> Result<PersistenceDiagramSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PersistenceDiagramSet::from_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_diagrams(paths: &[PathBuf]) -> Result<Vec<PersistenceDiagramSet>> {
    paths.par_iter().map(|p| read_diagram(p)).collect()
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn gen(args: GenArgs) -> Result<()> {
    let kind = match args.shape {
        ShapeArg::Circle => ShapeKind::Circle {
            radius: args.radius.unwrap_or(1.0),
        },
        ShapeArg::Sphere => ShapeKind::Sphere {
            radius: args.radius.unwrap_or(1.0),
        },
        ShapeArg::Torus => ShapeKind::Torus {
            major: args.major,
            minor: args.minor,
        },
        ShapeArg::Clusters => ShapeKind::Clusters {
            count: args.clusters,
            separation: args.separation,
        },
        ShapeArg::Helix => ShapeKind::Helix {
            radius: args.radius.unwrap_or(HELIX_DEFAULT_RADIUS),
        },
    };
    let cloud = generate_shape(&ShapeSpec {
        kind,
        n: args.n,
        noise: args.noise,
        seed: args.seed,
    })?;
    write_output(&args.output, &cloud.to_csv())
}

fn read_points(path: &Path) -> Result<PointCloud> {
    if path.extension().map(|e| e.eq_ignore_ascii_case("pdb")).unwrap_or(false) {
        Ok(parse_pdb_ca(path)?)
    } else {
        Ok(load_point_cloud_csv(path)?)
    }
}

pub fn barcode(args: BarcodeArgs) -> Result<()> {
    // Flag complexes need simplices one dimension above the top homology
    // dimension, otherwise that dimension's classes can never die.
    let (filtration, report_dim): (Filtration, Option<usize>) = match args.complex {
        ComplexArg::Rips => {
            let cloud = read_points(&args.input)?;
            (
                rips_filtration(&distance_matrix(&cloud), args.max_dim + 1, args.max_scale)?,
                Some(args.max_dim),
            )
        }
        ComplexArg::Alpha => {
            let cloud = read_points(&args.input)?;
            (alpha_filtration(&cloud)?, None)
        }
        ComplexArg::Clique => {
            let graph = formats::read_graph(&args.input)?;
            (clique_filtration(&graph, args.max_dim + 1)?, Some(args.max_dim))
        }
        ComplexArg::Cubical => {
            let grid = formats::read_grid(&args.input)?;
            (cubical_filtration(&grid)?, None)
        }
    };
    if let Some(dump) = &args.dump_filtration {
        fs::write(dump, filtration.dump()).with_context(|| format!("writing {}", dump.display()))?;
    }
    let mut diagram = diagrams(&filtration)?;
    if let Some(top) = report_dim {
        let bars = (0..=top).map(|k| diagram.bars(k).to_vec()).collect();
        diagram = PersistenceDiagramSet::from_bars(bars, diagram.max_value());
    }
    write_output(&args.output, &diagram.to_csv())
}

fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad dimension {t:?}"))
        })
        .collect()
}

fn parse_kinds(text: &str) -> Result<Vec<BinKind>> {
    text.split(',')
        .map(|t| match t.trim() {
            "bt" => Ok(BinKind::BtHist),
            "dt" => Ok(BinKind::DtHist),
            "pl" => Ok(BinKind::PlHist),
            "betti" => Ok(BinKind::BettiSamples),
            "pdgrid" => Ok(BinKind::PdGrid),
            "landscape" => Ok(BinKind::LandscapeSamples),
            "image" => Ok(BinKind::ImagePixels),
            other => bail!("unknown bin kind {other:?}"),
        })
        .collect()
}

fn parse_resolution(text: &str) -> Result<(usize, usize)> {
    let Some((a, b)) = text.split_once('x') else {
        bail!("resolution must look like 20x20, got {text:?}");
    };
    Ok((a.trim().parse()?, b.trim().parse()?))
}

pub fn vectorize(args: VectorizeArgs) -> Result<()> {
    let diagram_sets = read_diagrams(&args.diagrams)?;
    let ids: Vec<String> = args.diagrams.iter().map(|p| stem(p)).collect();
    let dim = args.dim;

    // A diagram CSV cannot distinguish an empty dimension from one that
    // was never computed, so differing stored dimensions only warrant a
    // warning; the vectorizers stay shape-stable either way.
    let max_dims: Vec<usize> = diagram_sets.iter().map(|d| d.max_dim()).collect();
    if let (Some(&lo), Some(&hi)) = (max_dims.iter().min(), max_dims.iter().max()) {
        if lo != hi {
            eprintln!(
                "warning: diagram dimensions are inconsistent across the corpus \
                 (stored max dims range {lo}..{hi}); absent dimensions contribute zeros"
            );
        }
    }

    let (col_names, rows): (Vec<String>, Vec<Vec<f64>>) = match args.method {
        MethodArg::Stats => (
            barcode_statistics_names(),
            diagram_sets.iter().map(barcode_statistics).collect(),
        ),
        MethodArg::Algebraic => (
            (1..=4).map(|i| format!("alg{i}_d{dim}")).collect(),
            diagram_sets
                .iter()
                .map(|d| algebraic_coordinates(d.bars(dim)))
                .collect(),
        ),
        MethodArg::Tropical => (
            (1..=5).map(|i| format!("trop{i}_d{dim}")).collect(),
            diagram_sets
                .iter()
                .map(|d| tropical_coordinates(d.bars(dim), d.max_value()))
                .collect(),
        ),
        MethodArg::Bins => {
            let mut spec = BinningSpec {
                max_value: args.max_value,
                bin_width: args.bin_width,
                kinds: parse_kinds(&args.kinds)?,
                dims: parse_dims(&args.dims)?,
                landscape_levels: args.levels,
                image: None,
            };
            if spec.kinds.contains(&BinKind::ImagePixels) {
                // Image parameters are derived once from the whole corpus
                // so every row shares the same pixel grid.
                let corpus: Vec<&[tda_core::persistence::Bar]> = spec
                    .dims
                    .iter()
                    .flat_map(|&k| diagram_sets.iter().map(move |d| d.bars(k)))
                    .collect();
                spec.image = Some(ImageParams::from_corpus(
                    &corpus,
                    parse_resolution(&args.image_res)?,
                )?);
            }
            (
                spec.column_names(),
                diagram_sets
                    .iter()
                    .map(|d| binned_features(d, &spec))
                    .collect::<tda_core::Result<_>>()?,
            )
        }
        MethodArg::Pbow | MethodArg::Pvlad => {
            let Some(model_path) = &args.model else {
                bail!("--method {} needs --model; run `tda fit --model codebook` first",
                      if matches!(args.method, MethodArg::Pbow) { "pbow" } else { "pvlad" });
            };
            let ModelFile::Codebook(cb) = formats::read_model(model_path)? else {
                bail!("{} is not a codebook model", model_path.display());
            };
            if matches!(args.method, MethodArg::Pbow) {
                (
                    (0..cb.k()).map(|i| format!("bow{i}_d{dim}")).collect(),
                    diagram_sets.iter().map(|d| pbow(d, dim, &cb)).collect(),
                )
            } else {
                (
                    (0..cb.k())
                        .flat_map(|i| [format!("vlad{i}x_d{dim}"), format!("vlad{i}y_d{dim}")])
                        .collect(),
                    diagram_sets.iter().map(|d| pvlad(d, dim, &cb)).collect(),
                )
            }
        }
        MethodArg::Pfv => {
            let Some(model_path) = &args.model else {
                bail!("--method pfv needs --model; run `tda fit --model gmm` first");
            };
            let ModelFile::Gmm(gmm) = formats::read_model(model_path)? else {
                bail!("{} is not a GMM model", model_path.display());
            };
            let m = gmm.m();
            let names: Vec<String> = (0..m)
                .flat_map(|i| [format!("dmu{i}x"), format!("dmu{i}y")])
                .chain((0..m).flat_map(|i| [format!("dsig{i}x"), format!("dsig{i}y")]))
                .collect();
            (
                names,
                diagram_sets.iter().map(|d| pfv(d, dim, &gmm)).collect(),
            )
        }
        MethodArg::Signature => {
            let Some(units_path) = &args.units else {
                bail!("--method signature needs --units (CSV of mu0,mu1,sigma0,sigma1,upsilon)");
            };
            let units = formats::read_units(units_path)?;
            (
                (0..units.len()).map(|i| format!("sig{i}_d{dim}")).collect(),
                diagram_sets
                    .iter()
                    .map(|d| signature_layer(d, dim, &units))
                    .collect::<tda_core::Result<_>>()?,
            )
        }
    };
    let matrix = FeatureMatrix::from_rows(ids, col_names, rows)?;
    write_output(&args.output, &matrix.to_csv())
}

pub fn dist(args: DistArgs) -> Result<()> {
    let a = read_diagram(&args.first)?;
    let b = read_diagram(&args.second)?;
    let value = match args.method {
        DistMethodArg::Bottleneck => bottleneck(a.bars(args.dim), b.bars(args.dim))?,
        DistMethodArg::Wasserstein => wasserstein(a.bars(args.dim), b.bars(args.dim), args.p)?,
        DistMethodArg::Sw => sliced_wasserstein(
            a.bars(args.dim),
            b.bars(args.dim),
            SwParams { slices: args.slices },
        )?,
        DistMethodArg::Fim => fisher_information_metric(
            a.bars(args.dim),
            b.bars(args.dim),
            &FimParams {
                sigma: args.sigma,
                grid_resolution: args.resolution,
                padding: 3.0,
            },
        )?,
    };
    println!("{}", numfmt::sig_digits(value, 12));
    Ok(())
}

pub fn gram(args: GramArgs) -> Result<()> {
    let diagram_sets = read_diagrams(&args.diagrams)?;
    let corpus: Vec<Vec<tda_core::persistence::Bar>> = diagram_sets
        .iter()
        .map(|d| d.capped_bars(args.dim))
        .collect();
    let cfg = match args.kernel {
        KernelArg::Pssk => KernelConfig::Pssk { sigma: args.sigma },
        KernelArg::Upssk => KernelConfig::Upssk { sigma: args.sigma },
        KernelArg::Pwgk => KernelConfig::Pwgk {
            sigma: args.sigma,
            c: args.c,
            p: args.p,
        },
        KernelArg::Gtk => KernelConfig::Gtk {
            h: args.h,
            positive_exponent: args.positive_exponent,
        },
        KernelArg::Glk => KernelConfig::Glk {
            h: args.h,
            positive_exponent: args.positive_exponent,
        },
        KernelArg::Pfk => KernelConfig::Pfk {
            t0: args.t0,
            fim: FimParams {
                sigma: args.fim_sigma,
                grid_resolution: args.fim_resolution,
                padding: 3.0,
            },
        },
        KernelArg::Gphk => {
            let end = args.grid_end.unwrap_or_else(|| {
                diagram_sets
                    .iter()
                    .map(|d| d.max_value())
                    .fold(1e-6, f64::max)
            });
            KernelConfig::Gphk {
                levels: args.levels,
                grid: Grid1D::new(0.0, end, args.grid_n)?,
            }
        }
    };
    let mut matrix = gram_matrix(&corpus, &cfg)?;
    matrix.sample_ids = args.diagrams.iter().map(|p| stem(p)).collect();
    eprintln!(
        "min eigenvalue {:.6e} (trace {:.6e}){}",
        matrix.min_eigenvalue,
        matrix.trace(),
        if matrix.is_psd(1e-8) {
            ""
        } else {
            "; warning: matrix is not positive semidefinite"
        }
    );
    write_output(&args.output, &matrix.to_csv())
}

pub fn fit(args: FitArgs) -> Result<()> {
    let diagram_sets = read_diagrams(&args.diagrams)?;
    let model = match args.model {
        ModelArg::Codebook => ModelFile::Codebook(fit_codebook(
            &diagram_sets,
            args.dim,
            args.k,
            args.weighted,
            args.seed,
        )?),
        ModelArg::Gmm => ModelFile::Gmm(fit_gmm(&diagram_sets, args.dim, args.k, args.seed)?),
    };
    let json = serde_json::to_string_pretty(&model)?;
    write_output(&args.output, &json)
}

/// Stratified train/test split over label indices.
fn split(
    labels: &[usize],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) || test_fraction <= 0.0 {
        bail!("test fraction must be in (0, 1)");
    }
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        let n_test = ((members.len() as f64 * test_fraction).round() as usize)
            .clamp(1, members.len().saturating_sub(1));
        test.extend_from_slice(&shuffled[..n_test]);
        train.extend_from_slice(&shuffled[n_test..]);
    }
    if train.is_empty() || test.is_empty() {
        bail!("split produced an empty train or test set");
    }
    Ok((train, test))
}

fn print_report(
    report: &EvalReport,
    class_names: &[String],
    best: &GridSearchResult,
) {
    println!(
        "selected C = {} ({}), cross-validation accuracy {:.1}%",
        best.c,
        match best.gamma {
            Some(g) => format!("gamma = {g}"),
            None => "no gamma".into(),
        },
        100.0 * best.cv_accuracy
    );
    print!("{}", report.table(class_names));
}

pub fn classify(args: ClassifyArgs) -> Result<()> {
    let label_map = formats::read_labels(&args.labels)?;
    // Class names sorted; indices are positions in that order.
    let mut class_names: Vec<String> = label_map.values().cloned().collect();
    class_names.sort();
    class_names.dedup();
    if class_names.len() < 2 {
        bail!("need at least two classes, found {:?}", class_names);
    }
    let class_index = |name: &str| -> Result<usize> {
        class_names
            .iter()
            .position(|c| c == name)
            .with_context(|| format!("unknown class {name:?}"))
    };
    let mixed = match &args.mixed_class {
        Some(name) => class_index(name)?,
        None => 0,
    };

    match (&args.features, &args.gram) {
        (Some(feature_path), None) => {
            let text = fs::read_to_string(feature_path)
                .with_context(|| format!("reading {}", feature_path.display()))?;
            let features = FeatureMatrix::from_csv(&text)?;
            let labels = resolve_labels(&features.sample_ids, &label_map, &class_names)?;
            let (train_idx, test_idx) = split(&labels, args.test_fraction, args.seed)?;

            let take = |idx: &[usize]| -> Result<(FeatureMatrix, Vec<usize>)> {
                let rows: Vec<Vec<f64>> = idx.iter().map(|&i| features.row(i).to_vec()).collect();
                let ids: Vec<String> =
                    idx.iter().map(|&i| features.sample_ids[i].clone()).collect();
                Ok((
                    FeatureMatrix::from_rows(ids, features.col_names.clone(), rows)?,
                    idx.iter().map(|&i| labels[i]).collect(),
                ))
            };
            let (train_raw, y_train) = take(&train_idx)?;
            let (test_raw, y_test) = take(&test_idx)?;
            let prep = Preprocessor::fit(&train_raw)?;
            let train = prep.apply(&train_raw)?;
            let test = prep.apply(&test_raw)?;

            let search_kernel = match args.kernel {
                ClassifyKernelArg::Rbf => SearchKernel::Rbf,
                ClassifyKernelArg::Linear => SearchKernel::Linear,
            };
            let best = grid_search_cv(
                &SvmInput::Features(&train),
                &y_train,
                search_kernel,
                &default_c_grid(),
                &default_gamma_grid(),
                args.folds,
                args.seed,
            )?;
            let cfg = SvmConfig::new(
                match best.gamma {
                    Some(gamma) => SvmKernel::Rbf { gamma },
                    None => SvmKernel::Linear,
                },
                best.c,
            );
            let model = ovr_train(&SvmInput::Features(&train), &y_train, &cfg)?;
            let predictions: Vec<usize> =
                (0..test.n_samples()).map(|i| model.predict(test.row(i))).collect();
            let report = evaluate(&predictions, &y_test, mixed)?;
            print_report(&report, &class_names, &best);
        }
        (None, Some(gram_path)) => {
            let text = fs::read_to_string(gram_path)
                .with_context(|| format!("reading {}", gram_path.display()))?;
            let full = GramMatrix::from_csv(&text)?;
            if !full.is_psd(1e-8) {
                eprintln!(
                    "warning: gram matrix min eigenvalue {:.3e} is negative; training proceeds",
                    full.min_eigenvalue
                );
            }
            let labels = resolve_labels(&full.sample_ids, &label_map, &class_names)?;
            let (train_idx, test_idx) = split(&labels, args.test_fraction, args.seed)?;
            let sub = sub_gram(&full, &train_idx);
            let y_train: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
            let best = grid_search_cv(
                &SvmInput::Gram(&sub),
                &y_train,
                SearchKernel::Precomputed,
                &default_c_grid(),
                &[],
                args.folds,
                args.seed,
            )?;
            let cfg = SvmConfig::new(SvmKernel::Precomputed, best.c);
            let model: OvrModel = ovr_train(&SvmInput::Gram(&sub), &y_train, &cfg)?;
            let predictions: Vec<usize> = test_idx
                .iter()
                .map(|&t| {
                    let krow: Vec<f64> = train_idx.iter().map(|&i| full.get(t, i)).collect();
                    model.predict_krow(&krow)
                })
                .collect();
            let y_test: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
            let report = evaluate(&predictions, &y_test, mixed)?;
            print_report(&report, &class_names, &best);
        }
        _ => bail!("provide exactly one of --features or --gram"),
    }
    Ok(())
}

fn resolve_labels(
    ids: &[String],
    label_map: &BTreeMap<String, String>,
    class_names: &[String],
) -> Result<Vec<usize>> {
    ids.iter()
        .map(|id| {
            let name = label_map
                .get(id)
                .with_context(|| format!("no label for sample {id:?}"))?;
            Ok(class_names.iter().position(|c| c == name).unwrap())
        })
        .collect()
}

fn sub_gram(full: &GramMatrix, idx: &[usize]) -> GramMatrix {
    let m = idx.len();
    let mut values = vec![0.0; m * m];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            values[a * m + b] = full.get(i, j);
        }
    }
    GramMatrix::from_values(idx.iter().map(|&i| full.sample_ids[i].clone()).collect(), values)
}

pub fn plot(args: PlotArgs) -> Result<()> {
    let diagram = read_diagram(&args.diagram)?;
    let content = match args.kind {
        PlotKindArg::Pd => svg::plot_diagram(&diagram),
        PlotKindArg::Pb => svg::plot_barcode(&diagram),
    };
    write_output(&args.output, &content)
}
