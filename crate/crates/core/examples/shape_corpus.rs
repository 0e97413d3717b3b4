//! Writes the synthetic hub corpus under `fixtures/shape/`.
//!
//! Most entries cite History together with one partner specialty, so History ends up as the
//! hub of the specialty map. Music only meets the rest through Arts and Humanities.
//!
//! ```text
//! cargo run -p sciomap --example shape_corpus [-- OUT_DIR]
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_190_301;
const MENTIONS: usize = 500;
const ARTICLES_PER_JOURNAL: usize = 8;

const HUB: (&str, &str) = ("History", "1202");
const PARTNERS: [(&str, &str); 11] = [
    ("Arts and Humanities", "1200"),
    ("Language and Linguistics", "1203"),
    ("Archeology", "1204"),
    ("Classics", "1205"),
    ("Conservation", "1206"),
    ("History and Philosophy of Science", "1207"),
    ("Literature and Literary Theory", "1208"),
    ("Museology", "1209"),
    ("Philosophy", "1211"),
    ("Religious studies", "1212"),
    ("Visual Arts and Performing Arts", "1213"),
];
const MUSIC: (&str, &str) = ("Music", "1210");

struct Journal {
    title: String,
    issn: String,
    label: &'static str,
    code: &'static str,
}

fn issn(body: u32) -> String {
    let digits: Vec<u32> = format!("{body:07}").chars().map(|c| c.to_digit(10).unwrap()).collect();
    let sum: u32 = digits.iter().zip((2..=8).rev()).map(|(d, w)| d * w).sum();
    let check = match (11 - sum % 11) % 11 {
        10 => 'X',
        c => char::from_digit(c, 10).unwrap(),
    };
    format!("{}-{}{check}", &format!("{body:07}")[..4], &format!("{body:07}")[4..])
}

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/shape")
    });
    std::fs::create_dir_all(&out).expect("output directory");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut journals = Vec::new();
    let mut next_body = 1_000_100;
    let mut add = |label: &'static str, code: &'static str, count: usize, journals: &mut Vec<Journal>| {
        for k in 0..count {
            journals.push(Journal { title: format!("{label} Review {}", k + 1), issn: issn(next_body), label, code });
            next_body += 37;
        }
    };
    add(HUB.0, HUB.1, 6, &mut journals);
    for (label, code) in PARTNERS {
        add(label, code, 2, &mut journals);
    }
    add(MUSIC.0, MUSIC.1, 2, &mut journals);

    let by_label = |label: &str| -> Vec<usize> {
        journals.iter().enumerate().filter(|(_, j)| j.label == label).map(|(i, _)| i).collect()
    };
    let hub_journals = by_label(HUB.0);

    let mut sources = String::from(
        "title,print_issn,e_issn,asjc_codes,specialty_names,open_access,top_percentile,scholarly_output,citation_count\n",
    );
    for j in &journals {
        let open = rng.random_bool(0.3);
        let pct = rng.random_range(1..=60);
        let output = rng.random_range(20..400);
        let cites = output * rng.random_range(2..12);
        writeln!(sources, "{},{},,{},{},{open},{pct},{output},{cites}", j.title, j.issn, j.code, j.label).unwrap();
    }

    let mut mentions = String::from(
        "mention_id,doi,article_title,journal_title,issns,wiki_page_title,wiki_language,mention_date,article_year\n",
    );
    let languages = ["en", "en", "en", "es", "fr", "de"];
    let first_day = NaiveDate::from_ymd_opt(2007, 1, 1).unwrap();
    let days = (NaiveDate::from_ymd_opt(2017, 12, 31).unwrap() - first_day).num_days();
    let mut written = 0;
    let mut entry = 0;
    while written < MENTIONS {
        entry += 1;
        let roll: f64 = rng.random();
        // (journal pool, number of articles) per group cited by this entry.
        let groups: Vec<(Vec<usize>, usize)> = if roll < 0.72 {
            let partner = PARTNERS.choose(&mut rng).unwrap().0;
            vec![(hub_journals.clone(), rng.random_range(1..=3)), (by_label(partner), rng.random_range(1..=2))]
        } else if roll < 0.9 {
            vec![(by_label(MUSIC.0), rng.random_range(1..=2)), (by_label(PARTNERS[0].0), rng.random_range(1..=2))]
        } else {
            let a = PARTNERS.choose(&mut rng).unwrap().0;
            let b = PARTNERS.choose(&mut rng).unwrap().0;
            vec![(by_label(a), 1), (by_label(b), 1)]
        };
        let language = languages.choose(&mut rng).unwrap();
        let page = format!("Topic {entry:03}");
        for (pool, count) in groups {
            for _ in 0..count {
                if written == MENTIONS {
                    break;
                }
                let j = &journals[*pool.choose(&mut rng).unwrap()];
                let article = rng.random_range(0..ARTICLES_PER_JOURNAL);
                let date = first_day + chrono::Days::new(rng.random_range(0..=days) as u64);
                let year = rng.random_range(1990..=2016);
                written += 1;
                writeln!(
                    mentions,
                    "s{written:04},10.5555/{}.{article},Article {article} in {},{},{},{page},{language},{date},{year}",
                    j.issn, j.title, j.title, j.issn
                )
                .unwrap();
            }
        }
    }

    let config = "\
# Synthetic hub corpus written by the shape_corpus example.
output_dir = \"out\"
offline = true

[inputs]
mentions = \"mentions.csv\"
sources = \"sources.csv\"
labels = \"../labels.txt\"

[rules]
discipline = \"Arts and Humanities\"
year_window = [2007, 2017]
min_weight = 3
counting = \"entries\"
levels = [\"journal\", \"specialty\"]
pathfinder_r = \"inf\"
pathfinder_q = \"max\"
seed = 11
top_k = 25
";
    std::fs::write(out.join("mentions.csv"), mentions).unwrap();
    std::fs::write(out.join("sources.csv"), sources).unwrap();
    std::fs::write(out.join("shape.toml"), config).unwrap();
    println!("wrote {MENTIONS} mentions over {entry} entries to {}", out.display());
}
