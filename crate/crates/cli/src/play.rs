//! Interactive session over element ids `1..=n`.
//!
//! As Responder the human keeps a number in mind and answers `y`/`n`; the
//! tool asks optimal questions. As Questioner the human types sets of ids and
//! the tool answers adversarially. `state` prints the current assignment of
//! ids to lie counts; `quit` ends the session.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use liargame::solver::Engine;
use liargame::strategies::ElementBoard;
use liargame::{Answer, Error, GameState, Params};

use crate::{CliError, Role};

#[derive(Debug, Clone)]
pub struct PlayConfig {
    pub params: Params,
    pub n: u32,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaySummary {
    pub questions: usize,
    /// 1-based id of the last candidate standing.
    pub found: Option<usize>,
    /// False when the answers ruled out every candidate.
    pub consistent: bool,
    pub quit: bool,
}

enum Line {
    Text(String),
    Eof,
}

fn read_line(input: &mut dyn BufRead) -> Result<Line, CliError> {
    let mut buf = String::new();
    if input.read_line(&mut buf)? == 0 {
        return Ok(Line::Eof);
    }
    Ok(Line::Text(buf.trim().to_string()))
}

fn ids(list: &[usize]) -> String {
    if list.is_empty() {
        return "-".into();
    }
    list.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn show_state(board: &ElementBoard, lies: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let state = board.state();
    writeln!(out, "state {state} (excluded {})", state.excluded())?;
    for c in 0..=lies {
        writeln!(out, "  {c} lie(s): {}", ids(&board.members(c)))?;
    }
    let gone: Vec<usize> = (0..board.len())
        .filter(|&i| board.component_of(i).is_none())
        .collect();
    writeln!(out, "  excluded: {}", ids(&gone))?;
    Ok(())
}

fn cap_text(params: &Params) -> String {
    if params.is_basic() {
        "any number of".into()
    } else {
        format!("at most {}", params.cap)
    }
}

pub fn run_play(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    config: &PlayConfig,
) -> Result<PlaySummary, CliError> {
    if config.n == 0 {
        return Err(Error::Domain("play needs n >= 1".into()).into());
    }
    let engine = Engine::default();
    let start = GameState::initial(config.n, config.params.lies);
    let value = engine.value(&start, config.params)?;
    match config.role {
        Role::Responder => responder_session(input, out, config, &engine, &start, value),
        Role::Questioner => questioner_session(input, out, config, &engine, &start, value),
    }
}

fn finish(
    board: &ElementBoard,
    questions: usize,
    out: &mut dyn Write,
) -> Result<PlaySummary, CliError> {
    let live = board.live();
    let found = match live.as_slice() {
        [one] => {
            writeln!(out, "found {} after {questions} question(s)", one + 1)?;
            Some(*one)
        }
        [] => {
            writeln!(out, "warning: no number is consistent with these answers; more lies than allowed were told")?;
            None
        }
        _ => None,
    };
    Ok(PlaySummary {
        questions,
        found: found.map(|i| i + 1),
        consistent: !live.is_empty(),
        quit: false,
    })
}

fn responder_session(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    config: &PlayConfig,
    engine: &Engine,
    start: &GameState,
    value: u32,
) -> Result<PlaySummary, CliError> {
    let params = config.params;
    writeln!(
        out,
        "Think of a number in 1..={}. You may lie up to {} time(s). I ask about {} numbers at once and need at most {value} question(s).",
        config.n,
        params.lies,
        cap_text(&params)
    )?;
    let mut board = ElementBoard::from_state(start);
    let mut history: Vec<(BTreeSet<usize>, Answer)> = Vec::new();
    let mut questions = 0;
    while !board.state().is_terminal() {
        let state = board.state();
        let query = engine
            .solve(&state, params)?
            .principal
            .expect("nonterminal state has a principal query");
        let asked: BTreeSet<usize> = board.select(&query)?.into_iter().collect();
        let list: Vec<usize> = asked.iter().copied().collect();
        let answer = loop {
            write!(
                out,
                "Q{}: is your number one of {}? [y/n] ",
                questions + 1,
                ids(&list)
            )?;
            out.flush()?;
            match read_line(input)? {
                Line::Eof => {
                    writeln!(out)?;
                    return Ok(PlaySummary {
                        questions,
                        found: None,
                        consistent: true,
                        quit: true,
                    });
                }
                Line::Text(t) => match t.as_str() {
                    "state" => show_state(&board, params.lies, out)?,
                    "quit" | "q" => {
                        return Ok(PlaySummary {
                            questions,
                            found: None,
                            consistent: true,
                            quit: true,
                        });
                    }
                    other => match other.parse::<Answer>() {
                        Ok(a) => break a,
                        Err(_) => writeln!(out, "please answer y or n (or `state`, `quit`)")?,
                    },
                },
            }
        };
        board.apply(&asked, answer);
        history.push((asked, answer));
        questions += 1;
    }
    let summary = finish(&board, questions, out)?;
    reveal(input, out, config, &history)?;
    Ok(summary)
}

/// Optional end-of-game check: the human names their number and the tool
/// counts how often the answers contradicted it.
fn reveal(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    config: &PlayConfig,
    history: &[(BTreeSet<usize>, Answer)],
) -> Result<(), CliError> {
    write!(out, "Your number, to check the answers (enter to skip): ")?;
    out.flush()?;
    let Line::Text(text) = read_line(input)? else {
        writeln!(out)?;
        return Ok(());
    };
    if text.is_empty() {
        return Ok(());
    }
    let id = match text.parse::<u32>() {
        Ok(id) if id >= 1 && id <= config.n => id as usize - 1,
        _ => {
            writeln!(out, "not an id in 1..={}; skipping the check", config.n)?;
            return Ok(());
        }
    };
    let lies = history
        .iter()
        .filter(|(asked, answer)| (*answer == Answer::Yes) != asked.contains(&id))
        .count();
    if lies > config.params.lies {
        writeln!(
            out,
            "warning: {lies} of your answers were false for {}, more than the {} allowed",
            id + 1,
            config.params.lies
        )?;
    } else {
        writeln!(
            out,
            "{lies} false answer(s) for {}; within the budget",
            id + 1
        )?;
    }
    Ok(())
}

fn parse_ids(text: &str, n: u32) -> Result<BTreeSet<usize>, String> {
    let mut set = BTreeSet::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let id: u32 = tok
            .parse()
            .map_err(|_| format!("`{tok}` is not a number"))?;
        if id == 0 || id > n {
            return Err(format!("ids must lie in 1..={n}, got {id}"));
        }
        set.insert(id as usize - 1);
    }
    if set.is_empty() {
        return Err("ask at least one number".into());
    }
    Ok(set)
}

fn questioner_session(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    config: &PlayConfig,
    engine: &Engine,
    start: &GameState,
    value: u32,
) -> Result<PlaySummary, CliError> {
    let params = config.params;
    writeln!(
        out,
        "I hold a number in 1..={} and may lie up to {} time(s). Ask about {} numbers at once, e.g. `1 2 5`. Best possible worst case: {value} question(s).",
        config.n,
        params.lies,
        cap_text(&params)
    )?;
    let mut board = ElementBoard::from_state(start);
    let mut questions = 0;
    while !board.state().is_terminal() {
        write!(out, "Q{}> ", questions + 1)?;
        out.flush()?;
        let text = match read_line(input)? {
            Line::Eof => {
                writeln!(out)?;
                return Ok(PlaySummary {
                    questions,
                    found: None,
                    consistent: true,
                    quit: true,
                });
            }
            Line::Text(t) => t,
        };
        match text.as_str() {
            "state" => {
                show_state(&board, params.lies, out)?;
                continue;
            }
            "quit" | "q" => {
                return Ok(PlaySummary {
                    questions,
                    found: None,
                    consistent: true,
                    quit: true,
                })
            }
            _ => {}
        }
        let asked = match parse_ids(&text, config.n) {
            Ok(s) => s,
            Err(m) => {
                writeln!(out, "{m}")?;
                continue;
            }
        };
        if !params.is_basic() && asked.len() > params.cap as usize {
            writeln!(
                out,
                "too many numbers: {} asked, the cap is k={}",
                asked.len(),
                params.cap
            )?;
            continue;
        }
        let state = board.state();
        let query = board.query_for(&asked)?;
        let (yes, no) = engine.solver(params).child_values(&state, &query)?;
        let answer = if yes > no { Answer::Yes } else { Answer::No };
        writeln!(out, "{answer}")?;
        board.apply(&asked, answer);
        questions += 1;
    }
    finish(&board, questions, out)
}
