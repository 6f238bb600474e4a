use super::{Decision, DfsPlan, Order, Side, Strategy, StrategyOf};
use crate::error::{Error, Result};

fn bad(spec: &str, msg: impl std::fmt::Display) -> Error {
    Error::StrategySpec(format!("`{spec}`: {msg}"))
}

fn side(spec: &str, s: &str) -> Result<Side> {
    match s {
        "S" => Ok(Side::S),
        "Sbar" => Ok(Side::Sbar),
        _ => Err(bad(spec, format!("expected S or Sbar, found `{s}`"))),
    }
}

fn names(s: &str) -> Vec<String> {
    s.split('+').map(|x| x.trim().to_string()).collect()
}

/// Splits on `sep` at bracket depth zero.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses a strategy description:
///
/// ```text
/// none | all:S | all:Sbar | rest:S | rest:Sbar
/// bfs_cluster:v
/// dfs:v,id|right_hand|left_hand,S|Sbar|until:x|until_any:x+y[,stop:x+y]
/// dfs_stop_at:v,x[,y...]
/// rhw_walks:a,b,k
/// seq:[spec;spec;...]
/// fixed:e1:S,e2:Sbar
/// ```
pub fn parse_strategy(spec: &str) -> Result<Strategy> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let args: Vec<&str> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(str::trim).collect()
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(bad(spec, format!("`{kind}` expects {n} argument(s)")))
        }
    };
    Ok(match kind {
        "none" => {
            arity(0)?;
            StrategyOf::Stop
        }
        "all" | "rest" => {
            arity(1)?;
            StrategyOf::Rest(side(spec, args[0])?)
        }
        "bfs_cluster" => {
            arity(1)?;
            Strategy::bfs(args[0])
        }
        "dfs" => {
            if !(3..=4).contains(&args.len()) {
                return Err(bad(spec, "`dfs` expects start,order,decision[,stop:...]"));
            }
            let order = match args[1] {
                "id" => Order::Id,
                "right_hand" => Order::RightHand,
                "left_hand" => Order::LeftHand,
                o => return Err(bad(spec, format!("unknown order `{o}`"))),
            };
            let decision = match args[2].split_once(':') {
                None if args[2] == "S" => Decision::AlwaysS,
                None if args[2] == "Sbar" => Decision::AlwaysSbar,
                Some(("until", t)) => Decision::UntilVisited(t.to_string()),
                Some(("until_any", ts)) => Decision::UntilAny(names(ts)),
                _ => return Err(bad(spec, format!("unknown decision `{}`", args[2]))),
            };
            let stop_at = match args.get(3) {
                None => Vec::new(),
                Some(s) => match s.split_once(':') {
                    Some(("stop", ts)) => names(ts),
                    _ => return Err(bad(spec, format!("expected stop:..., found `{s}`"))),
                },
            };
            StrategyOf::Dfs(DfsPlan {
                start: args[0].to_string(),
                order,
                decision,
                stop_at,
            })
        }
        "dfs_stop_at" => {
            if args.len() < 2 {
                return Err(bad(spec, "`dfs_stop_at` expects a start and targets"));
            }
            Strategy::dfs_stop_at(args[0], &args[1..])
        }
        "rhw_walks" => {
            arity(3)?;
            let k = args[2]
                .parse()
                .map_err(|_| bad(spec, format!("bad walk count `{}`", args[2])))?;
            Strategy::rhw_walks(args[0], args[1], k)
        }
        "seq" => {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad(spec, "`seq` expects [spec;spec;...]"))?;
            StrategyOf::Seq(
                split_top(inner, ';')
                    .into_iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(parse_strategy)
                    .collect::<Result<_>>()?,
            )
        }
        "fixed" => StrategyOf::Fixed(
            args.iter()
                .map(|a| {
                    let (e, s) = a
                        .rsplit_once(':')
                        .ok_or_else(|| bad(spec, format!("expected edge:side, found `{a}`")))?;
                    Ok((e.to_string(), side(spec, s)?))
                })
                .collect::<Result<_>>()?,
        ),
        _ => return Err(bad(spec, format!("unknown strategy kind `{kind}`"))),
    })
}
