//! Rebuilds `data/groups` and `data/chains` from the group generators.

mod ctx;
mod graphs;
mod groups;
mod hs;
mod j2;
mod m11;
mod m12;
mod m22;

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use gensift::chain::spec::ChainSpec;
use gensift::oracle::EnumeratedGroup;
use gensift::BlackBoxGroup;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(about = "Rebuild the shipped generator and chain files")]
struct Args {
    /// Output directory holding `groups/` and `chains/`.
    #[arg(long, default_value = "data")]
    out: PathBuf,
    /// Only rebuild these groups.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

fn write_group(args: &Args, group: &BlackBoxGroup) -> Result<()> {
    let path = args.out.join("groups").join(format!("{}.gens", group.label()));
    fs::write(&path, group.to_text()).with_context(|| format!("writing {}", path.display()))
}

fn write_chain(args: &Args, spec: &ChainSpec) -> Result<()> {
    let path = args.out.join("chains").join(format!("{}.chain", spec.name));
    fs::write(&path, spec.to_text()).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn wanted(args: &Args, name: &str) -> bool {
    args.only.is_empty() || args.only.iter().any(|o| o == name)
}

fn main() -> Result<()> {
    let args = Args::parse();
    fs::create_dir_all(args.out.join("groups"))?;
    fs::create_dir_all(args.out.join("chains"))?;

    if wanted(&args, "m11") {
        let group = groups::m11()?;
        write_group(&args, &group)?;
        write_group(&args, &groups::m11_gf2()?)?;
        let g = EnumeratedGroup::with_default_cap(group.generators())?;
        anyhow::ensure!(g.order() == 7920, "M11 generators give order {}", g.order());
        write_chain(&args, &m11::chain_1(&group, &g)?)?;
        write_chain(&args, &m11::chain_2(&group, &g)?)?;
    }
    if wanted(&args, "m12") {
        let group = groups::m12()?;
        write_group(&args, &group)?;
        let g = EnumeratedGroup::with_default_cap(group.generators())?;
        anyhow::ensure!(g.order() == 95040, "M12 generators give order {}", g.order());
        write_chain(&args, &m12::chain(&group, &g)?)?;
    }
    if wanted(&args, "m22") {
        let group = groups::m22()?;
        write_group(&args, &group)?;
        let g = EnumeratedGroup::with_default_cap(group.generators())?;
        anyhow::ensure!(g.order() == 443520, "M22 generators give order {}", g.order());
        write_chain(&args, &m22::chain(&group, &g)?)?;
    }
    if wanted(&args, "j2") {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gens = {
            let raw = EnumeratedGroup::with_default_cap(&graphs::j2_generators(&mut rng)?)?;
            j2::standard_generators(&raw, &mut rng)?
        };
        let group = BlackBoxGroup::new("j2", gens)?;
        write_group(&args, &group)?;
        let g = EnumeratedGroup::with_default_cap(group.generators())?;
        anyhow::ensure!(g.order() == 604800, "J2 generators give order {}", g.order());
        write_chain(&args, &j2::chain_1(&group, &g)?)?;
        write_chain(&args, &j2::chain_2(&group, &g)?)?;
    }
    if wanted(&args, "hs") {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let group = hs::group(&mut rng)?;
        write_group(&args, &group)?;
        write_chain(&args, &hs::chain_1(&group, &mut rng)?)?;
        write_chain(&args, &hs::chain_2(&group, &mut rng)?)?;
    }
    Ok(())
}
