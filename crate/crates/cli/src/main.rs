use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pregeom::acceptance::{run_all, Level};
use pregeom::amalgam::{free_amalgam, standard_amalgam};
use pregeom::format::{parse_ids, read_file, write_file, AnyStructure};
use pregeom::generic::{grow, save_chain, Chain, Growable, GrowthSchedule};
use pregeom::geometry::{back_and_forth, clique_to_nary, nary_to_clique, remove_pathologies, PartialPgIso, DEFAULT_MAX_DELTA};
use pregeom::pregeometry::{DEFAULT_MAX_GROUND, MAX_TABLE_GROUND};
use pregeom::reduct::{lift, nondef_witness, reduct_of, reduct_within};
use pregeom::structures::fmt_set;
use pregeom::{
    closure, dims, in_class, is_strong, pg_isomorphic, pregeometry_of_bounded, predim_rel, ClassParams, CliqueStructure,
    ElementSet, Error, Kind, NaryStructure, Structure,
};

#[derive(Parser)]
#[command(name = "pregeom", version, about = "Pre-dimensions, strong substructures and pregeometries of finite structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a structure file
    Validate { file: PathBuf },
    /// Pre-dimension of SET over OVER (whole universe over the empty set by default)
    Predim {
        file: PathBuf,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        over: Option<String>,
    },
    /// Decide whether SUB is strong in the structure
    Strong {
        file: PathBuf,
        #[arg(long)]
        sub: String,
    },
    /// Decide membership in the amalgamation class
    Class { file: PathBuf },
    /// Closure of a set
    Closure {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Rank of a set in the pregeometry
    Rank {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Full rank table of the pregeometry
    Pg { file: PathBuf },
    /// Free (n-ary) or standard (clique) amalgam of two structures over a common set
    Amalgam {
        #[arg(long, value_enum)]
        kind: AmalgamKind,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "")]
        over: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Grow a chain of finite stages towards the generic structure
    Grow {
        #[arg(long, value_enum)]
        class: ClassKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        ext_bound: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short)]
        o: PathBuf,
    },
    /// Clique reduct of an n-ary structure
    Reduct {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Clique reduct restricted to a strong subset, evaluated in the ambient structure
    ReductWithin {
        ambient: PathBuf,
        #[arg(long)]
        sub: String,
    },
    /// Lift a clique extension of the reduct back to an n-ary extension
    Lift {
        nary: PathBuf,
        clique: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Two extensions of F that differ but have equal reducts
    Nondef { file: PathBuf },
    /// Constructions relating the n-ary and clique classes
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Decide whether two structures have isomorphic pregeometries
    ComparePg { a: PathBuf, b: PathBuf },
    /// Back-and-forth between an n-ary stage and a clique stage
    Bnf {
        stage1: PathBuf,
        stage2: PathBuf,
        #[arg(long, default_value_t = 4)]
        rounds: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DELTA)]
        max_delta: usize,
        /// Directory for the extended stages
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Replace the new tuples of B over A by gadgets (n-ary, rs ≥ 4)
    RemovePathologies {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out_c: Option<PathBuf>,
        #[arg(long)]
        out_d: Option<PathBuf>,
    },
    /// From A ≤ B (n-ary) and A_c with the same pregeometry as A, build C_c
    ToClique {
        a: PathBuf,
        ac: PathBuf,
        b: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// From A_c ≤ B_c and A_rs with the same pregeometry as A_c, build B_rs
    ToNary {
        ac: PathBuf,
        ars: PathBuf,
        bc: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AmalgamKind {
    Free,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassKind {
    Nary,
    Clique,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// Command result other than an error: success, or a negative answer.
enum Answer {
    Yes,
    No,
}

type Res = Result<Answer, Error>;

macro_rules! on_any {
    ($any:expr, $a:ident => $body:expr) => {
        match $any {
            AnyStructure::Nary($a) => $body,
            AnyStructure::Clique($a) => $body,
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Answer::Yes) => ExitCode::SUCCESS,
        Ok(Answer::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Io(_) | Error::InvalidParams { .. } | Error::NotInUniverse(_) => 2,
                _ => 1,
            })
        }
    }
}

fn max_ground() -> Result<usize, Error> {
    match std::env::var("PREGEOM_MAX_GROUND") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse { line: 0, msg: format!("PREGEOM_MAX_GROUND={v:?} is not an integer") }),
        Err(_) => Ok(DEFAULT_MAX_GROUND),
    }
}

fn load(path: &Path) -> Result<AnyStructure, Error> {
    let a = read_file(path)?;
    on_any!(&a, s => s.ensure_valid())?;
    Ok(a)
}

fn load_as<S: TryFrom<AnyStructure, Error = Error>>(path: &Path) -> Result<S, Error> {
    S::try_from(load(path)?).map_err(|e| Error::Parse { line: 1, msg: format!("{}: {e}", path.display()) })
}

fn ids(text: &str, a: &AnyStructure) -> Result<ElementSet, Error> {
    let set = parse_ids(text)?;
    let missing: Vec<_> = set.difference(a.universe()).copied().collect();
    if !missing.is_empty() {
        return Err(Error::NotInUniverse(missing));
    }
    Ok(set)
}

fn emit(a: AnyStructure, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => write_file(p, &a),
        None => {
            print!("{}", a.serialize());
            Ok(())
        }
    }
}

fn yes_if(b: bool) -> Answer {
    if b {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn run(cmd: Command) -> Res {
    match cmd {
        Command::Validate { file } => {
            let a = read_file(&file)?;
            let report = on_any!(&a, s => s.validate());
            if report.is_valid() {
                println!("valid");
            } else {
                print!("{report}");
                if !report.to_string().ends_with('\n') {
                    println!();
                }
            }
            Ok(yes_if(report.is_valid()))
        }
        Command::Predim { file, set, over } => {
            let a = load(&file)?;
            let set = set.map(|t| ids(&t, &a)).transpose()?.unwrap_or_else(|| a.universe().clone());
            let over = over.map(|t| ids(&t, &a)).transpose()?.unwrap_or_default();
            println!("{}", on_any!(&a, s => predim_rel(&set, &over, s))?);
            Ok(Answer::Yes)
        }
        Command::Strong { file, sub } => {
            let a = load(&file)?;
            let sub = ids(&sub, &a)?;
            let report = on_any!(&a, s => is_strong(&sub, s))?;
            match report.witness {
                None => println!("strong"),
                Some(w) => println!("not strong: witness {} relative {}", fmt_set(&w.set), w.relative),
            }
            Ok(yes_if(report.strong))
        }
        Command::Class { file } => {
            let a = load(&file)?;
            if on_any!(&a, s => in_class(s))? {
                println!("in class");
                return Ok(Answer::Yes);
            }
            let report = on_any!(&a, s => is_strong(&ElementSet::new(), s))?;
            let w = report.witness.expect("a structure outside the class has a witness");
            println!("not in class: witness {} predim {}", fmt_set(&w.set), w.relative);
            Ok(Answer::No)
        }
        Command::Closure { file, set } => {
            let a = load(&file)?;
            let set = ids(&set, &a)?;
            println!("{}", fmt_set(&on_any!(&a, s => closure(s, &set))?));
            Ok(Answer::Yes)
        }
        Command::Rank { file, set } => {
            let a = load(&file)?;
            let set = ids(&set, &a)?;
            println!("{}", on_any!(&a, s => dims(s, &set))?);
            Ok(Answer::Yes)
        }
        Command::Pg { file } => {
            let a = load(&file)?;
            let cap = max_ground()?.min(MAX_TABLE_GROUND);
            let pg = on_any!(&a, s => pregeometry_of_bounded(s, cap))?;
            let ground = pg.ground().to_vec();
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for m in 0..(1u128 << ground.len()) {
                let set: ElementSet = (0..ground.len()).filter(|&i| m & (1 << i) != 0).map(|i| ground[i]).collect();
                // a closed pipe ends the listing
                if writeln!(out, "{} {}", fmt_set(&set), pg.rank_mask(m)).is_err() {
                    break;
                }
            }
            let _ = out.flush();
            Ok(Answer::Yes)
        }
        Command::Amalgam { kind, a, b, over, o } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let over = ids(&over, &a)?;
            let out: AnyStructure = match (kind, a, b) {
                (AmalgamKind::Free, AnyStructure::Nary(a), AnyStructure::Nary(b)) => free_amalgam(&a, &b, &over)?.amalgam.into(),
                (AmalgamKind::Standard, AnyStructure::Clique(a), AnyStructure::Clique(b)) => {
                    standard_amalgam(&a, &b, &over)?.amalgam.into()
                }
                _ => {
                    return Err(Error::Precondition(
                        "free amalgams take two n-ary structures, standard amalgams two clique structures".into(),
                    ))
                }
            };
            emit(out, o.as_deref())?;
            Ok(Answer::Yes)
        }
        Command::Grow { class, n, r, max_size, ext_bound, seed, o } => {
            let params = ClassParams::new(n, r)?;
            let kind = match class {
                ClassKind::Nary => Kind::Nary,
                ClassKind::Clique => Kind::Clique,
            };
            let schedule = GrowthSchedule { kind, params, max_stage_size: max_size, extension_size_bound: ext_bound, seed };
            match class {
                ClassKind::Nary => grow_and_save(grow::<NaryStructure>(&schedule)?, &o)?,
                ClassKind::Clique => grow_and_save(grow::<CliqueStructure>(&schedule)?, &o)?,
            }
            Ok(Answer::Yes)
        }
        Command::Reduct { file, o } => {
            let a: NaryStructure = load_as(&file)?;
            emit(reduct_of(&a)?.into(), o.as_deref())?;
            Ok(Answer::Yes)
        }
        Command::ReductWithin { ambient, sub } => {
            let any = load(&ambient)?;
            let sub = ids(&sub, &any)?;
            let m = NaryStructure::try_from(any)?;
            emit(reduct_within(&m, &sub)?.into(), None)?;
            Ok(Answer::Yes)
        }
        Command::Lift { nary, clique, o } => {
            let a: NaryStructure = load_as(&nary)?;
            let bc: CliqueStructure = load_as(&clique)?;
            let out = lift(&a, &bc)?;
            print!("{}", out.report);
            emit(out.c.into(), o.as_deref())?;
            Ok(Answer::Yes)
        }
        Command::Nondef { file } => {
            let f: NaryStructure = load_as(&file)?;
            let out = nondef_witness(&f)?;
            println!("# A");
            print!("{}", AnyStructure::from(out.a).serialize());
            println!("# B");
            print!("{}", AnyStructure::from(out.b).serialize());
            Ok(Answer::Yes)
        }
        Command::Gadget { which } => run_gadget(which),
        Command::ComparePg { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let cap = max_ground()?;
            let p = on_any!(&a, s => pregeometry_of_bounded(s, cap))?;
            let q = on_any!(&b, s => pregeometry_of_bounded(s, cap))?;
            match pg_isomorphic(&p, &q) {
                Some(map) => {
                    let pairs: Vec<String> = map.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                    println!("isomorphic {}", if pairs.is_empty() { "-".to_string() } else { pairs.join(" ") });
                    Ok(Answer::Yes)
                }
                None => {
                    println!("not isomorphic");
                    Ok(Answer::No)
                }
            }
        }
        Command::Bnf { stage1, stage2, rounds, max_delta, o } => {
            let s1: NaryStructure = load_as(&stage1)?;
            let s2: CliqueStructure = load_as(&stage2)?;
            let out = back_and_forth(&s1, &s2, &PartialPgIso::default(), rounds, max_delta)?;
            for (i, r) in out.rounds.iter().enumerate() {
                println!(
                    "round {i} {} extension {} fresh {} domain {}",
                    r.direction,
                    fmt_set(&r.extension),
                    if r.fresh_point { "yes" } else { "no" },
                    r.domain_size
                );
            }
            println!("map {}", out.iso);
            if let Some(dir) = o {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                write_file(&dir.join("stage1.txt"), &out.s1.into())?;
                write_file(&dir.join("stage2.txt"), &out.s2.into())?;
            }
            Ok(Answer::Yes)
        }
        Command::Selftest { level, seed } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let results = run_all(level, seed, |r| println!("{r}"));
            Ok(yes_if(results.iter().all(|r| r.passed || r.explained)))
        }
    }
}

fn grow_and_save<S: Growable>(chain: Chain<S>, dir: &Path) -> Result<(), Error> {
    save_chain(&chain, dir)?;
    println!(
        "stages {} size {} steps {} truncated {}",
        chain.stages.len(),
        chain.last().len(),
        chain.log.len(),
        if chain.truncated { "yes" } else { "no" }
    );
    Ok(())
}

fn run_gadget(which: GadgetCommand) -> Res {
    match which {
        GadgetCommand::RemovePathologies { a, b, out_c, out_d } => {
            let a: NaryStructure = load_as(&a)?;
            let b: NaryStructure = load_as(&b)?;
            let out = remove_pathologies(&a, &b)?;
            print!("{}", out.report);
            if out_c.is_none() {
                println!("# C");
            }
            emit(out.c.into(), out_c.as_deref())?;
            if out_d.is_none() {
                println!("# D");
            }
            emit(out.d.into(), out_d.as_deref())?;
            Ok(Answer::Yes)
        }
        GadgetCommand::ToClique { a, ac, b, o } => {
            let a: NaryStructure = load_as(&a)?;
            let ac: CliqueStructure = load_as(&ac)?;
            let b: NaryStructure = load_as(&b)?;
            let out = nary_to_clique(&a, &ac, &b)?;
            print!("{}", out.report);
            emit(out.cc.into(), o.as_deref())?;
            Ok(Answer::Yes)
        }
        GadgetCommand::ToNary { ac, ars, bc, o } => {
            let ac: CliqueStructure = load_as(&ac)?;
            let ars: NaryStructure = load_as(&ars)?;
            let bc: CliqueStructure = load_as(&bc)?;
            let out = clique_to_nary(&ac, &ars, &bc)?;
            print!("{}", out.report);
            println!("same pregeometry {}", if out.same_pregeometry { "yes" } else { "no" });
            emit(out.b_rs.into(), o.as_deref())?;
            Ok(Answer::Yes)
        }
    }
}
