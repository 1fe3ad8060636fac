use std::io::Write;

use topicforge_core::corpus::Vocabulary;
use topicforge_core::ingest::{load_sentiment_csv, load_troll_csv, Diagnostics, Polarity};
use topicforge_core::pipeline::{build_corpus, troll_documents, VocabOptions};
use topicforge_core::Error;

fn temp_csv(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

const TROLLS: &str = "\
external_author_id,author,content,region,language,publish_date,account_category
1,A,\"Vote for jobs, build the wall!\",US,English,1/5/2016 10:00,RightTroll
2,B,Police brutality must end now,US,English,2/7/2016 11:30,LeftTroll
3,C,Новости дня,RU,Russian,2/7/2016 11:30,RightTroll
4,D,Breaking: storm hits coast,US,English,3/1/2016 9:00,NewsFeed
5,E,\"Jobs, jobs, jobs for every worker\",US,English,6/9/2017 8:15,RightTroll
6,F,Police must answer for this,US,English,not a date,LeftTroll
";

#[test]
fn troll_file_to_corpus() {
    let f = temp_csv(TROLLS);
    let rows = load_troll_csv(f.path()).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].content, "Vote for jobs, build the wall!");

    let mut diag = Diagnostics::default();
    let docs = troll_documents(rows.clone(), None, &mut diag).unwrap();
    assert_eq!(docs.iter().map(|d| d.y).collect::<Vec<_>>(), vec![1.0, -1.0, 1.0, -1.0]);

    let mut diag = Diagnostics::default();
    let y2016 = troll_documents(rows, Some(2016), &mut diag).unwrap();
    assert_eq!(y2016.len(), 2);
    assert_eq!(diag.total(), 1, "{:?}", diag.lines());

    let opts = VocabOptions {
        no_below: 2,
        no_above: 1.0,
        keep_n: 100,
        tfidf: false,
    };
    let prepared = build_corpus(&docs, &opts, &mut Diagnostics::default()).unwrap();
    let mut tokens = prepared.vocab.tokens().to_vec();
    tokens.sort();
    assert_eq!(tokens, vec!["job", "must", "polic"]);
    assert_eq!(prepared.corpus.num_docs(), 4);

    let json = prepared.vocab.to_json().unwrap();
    assert_eq!(Vocabulary::from_json(&json).unwrap(), prepared.vocab);
}

#[test]
fn troll_file_missing_column_and_short_row() {
    let f = temp_csv("content,language,publish_date\nhi,English,1/1/2016 1:00\n");
    assert!(matches!(load_troll_csv(f.path()), Err(Error::MissingColumn(c)) if c == "account_category"));

    let f = temp_csv("content,language,publish_date,account_category\nhi,English\n");
    assert!(matches!(load_troll_csv(f.path()), Err(Error::ShortRow { row: 1, .. })));

    assert!(matches!(
        load_troll_csv("/nonexistent/trolls.csv"),
        Err(Error::Io { .. })
    ));
}

#[test]
fn sentiment_file_sampling() {
    let mut body = String::new();
    for i in 0..40 {
        let pol = if i % 2 == 0 { 0 } else { 4 };
        body.push_str(&format!(
            "\"{pol}\",\"{i}\",\"Mon Apr 06 2009\",\"NO_QUERY\",\"u{i}\",\"text number {i}\"\n"
        ));
    }
    body.push_str("\"2\",\"99\",\"d\",\"q\",\"u\",\"neutral\"\n");
    body.push_str("\"0\",\"short\"\n");
    let f = temp_csv(&body);

    let (all, diag) = load_sentiment_csv(f.path(), 1.0, 3).unwrap();
    assert_eq!(all.len(), 40);
    assert_eq!(diag.total(), 2);
    assert_eq!(all[1].polarity, Polarity::Positive);
    assert_eq!(all[1].text, "text number 1");

    let (half, _) = load_sentiment_csv(f.path(), 0.5, 3).unwrap();
    assert_eq!(half.len(), 20);
    assert_eq!(half.iter().filter(|r| r.polarity == Polarity::Positive).count(), 10);
    let (again, _) = load_sentiment_csv(f.path(), 0.5, 3).unwrap();
    assert_eq!(half, again);
}
