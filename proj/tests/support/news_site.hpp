#pragma once

// The standard 13-page outlet: root -> 4 sections -> 2 pages each. The first
// six leaf pages are articles, the last two are too short to count.
//
//   /            links /s0 /s1 /s2 /s3 (plus duplicates, fragments, off-site)
//   /sK          links /sK/a /sK/b (plus back-links)
//   /s0/a ... /s2/b   articles
//   /s3/a /s3/b       stubs

#include <string>
#include <vector>

#include "support/fixture_site.hpp"
#include "support/synthetic.hpp"

namespace veridict::fixtures {

inline std::vector<std::string> news_site_leaves() {
  std::vector<std::string> out;
  for (int k = 0; k < 4; ++k) {
    out.push_back("/s" + std::to_string(k) + "/a");
    out.push_back("/s" + std::to_string(k) + "/b");
  }
  return out;
}

inline std::string article_html(SyntheticWriter& w, Label label, const std::vector<std::string>& hrefs = {"/", "/s0"}) {
  return article_page(w.title(label), {w.text(label), w.text(label), w.text(label)}, hrefs);
}

/// `labels` gives the vocabulary of the six articles in leaf order.
inline void build_news_site(FixtureSite& site, SyntheticWriter& w, const std::vector<Label>& labels) {
  site.add_html("/", link_page("Front page", {"/s0", "/s1", "/s2", "/s3", "/s0/", "/#top", "/s1#latest",
                                               "http://elsewhere.invalid/story", "mailto:desk@news.test"}));
  for (int k = 0; k < 4; ++k) {
    const std::string s = "/s" + std::to_string(k);
    site.add_html(s, link_page("Section " + std::to_string(k),
                               {s + "/a", s + "/b", "/", "/s" + std::to_string((k + 1) % 4), s + "/a#more"}));
  }
  const auto leaves = news_site_leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i < labels.size() && i < 6) {
      site.add_html(leaves[i], article_html(w, labels[i], {"/", "/s0", leaves[(i + 1) % leaves.size()]}));
    } else {
      site.add_html(leaves[i], "<html><head><title>Stub</title></head><body><p>Coming soon.</p></body></html>");
    }
  }
}

}  // namespace veridict::fixtures
