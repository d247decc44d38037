mod common;

use chrono::{TimeZone, Utc};
use tablediff::mw_client::{count_references, ArticleRef, CachePolicy, PageDocument};

fn doc(html: &str) -> PageDocument {
    PageDocument {
        article: ArticleRef::new("en", "Refs").unwrap(),
        html: html.to_string(),
        revision_id: 1,
        revision_timestamp: Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap(),
        fetched_at: Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap(),
    }
}

#[test]
fn each_list_item_counts_once() {
    let html = r##"<div class="mw-parser-output">
        <p>Everest<sup class="reference"><a href="#cite_note-1">[1]</a></sup>
           K2<sup class="reference"><a href="#cite_note-2">[2]</a></sup>
           again<sup class="reference"><a href="#cite_note-1">[1]</a></sup>
           Lhotse<sup class="reference"><a href="#cite_note-3">[3]</a></sup></p>
        <div class="reflist"><ol class="references">
          <li id="cite_note-1"><span class="mw-cite-backlink">^ <a href="#cite_ref-1-0">a</a> <a href="#cite_ref-1-1">b</a></span> One.</li>
          <li id="cite_note-2">Two.</li>
          <li id="cite_note-3">Three.</li>
        </ol></div></div>"##;
    assert_eq!(count_references(&doc(html)).unwrap(), 3);
}

#[test]
fn page_without_references_counts_zero() {
    assert_eq!(
        count_references(&doc(
            "<div><p>No sources.</p><ol><li>plain list</li></ol></div>"
        ))
        .unwrap(),
        0
    );
}

#[test]
fn fixture_pages_match_recorded_counts() {
    let client = common::offline_client();
    for (lang, title, expected) in [
        ("en", "Eight-thousander", 264),
        ("en", "Lists of earthquakes", 236),
        ("zh", "土卫六湖泊", 70),
        ("zh", "未登峰列表", 0),
    ] {
        let page = client
            .fetch_page(
                &ArticleRef::new(lang, title).unwrap(),
                CachePolicy::OfflineOnly,
            )
            .unwrap();
        assert_eq!(count_references(&page).unwrap(), expected, "{lang}:{title}");
    }
}
