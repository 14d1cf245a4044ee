#include "judge/service/replay.hpp"

#include "judge/service/journal.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace judge::service {

namespace {

/// Wrong answers and execution errors. OLE and CE are in neither bucket.
bool incorrect(Status s) {
  return s == Status::TLE || s == Status::MLE || s == Status::RE || s == Status::WA;
}

constexpr std::int64_t kDayMs = 86'400'000;

std::int64_t utc_day(std::int64_t ms) { return ms >= 0 ? ms / kDayMs : (ms - kDayMs + 1) / kDayMs; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<ReplayRow> replay_contest(const std::vector<Event>& events, const std::optional<std::string>& problem_id) {
  ContestState state;
  for (const auto& e : events) state.apply(e);

  const ProblemEntry* entry = nullptr;
  if (problem_id) {
    entry = state.find_problem(*problem_id);
    if (entry == nullptr) throw UnknownProblem("journal has no problem '" + *problem_id + "'");
  } else {
    if (state.problems().size() != 1) {
      throw InvalidRequest("journal holds " + std::to_string(state.problems().size()) +
                           " problems; name the one to replay");
    }
    entry = &state.problems().begin()->second;
  }
  const Problem& problem = entry->problem;
  const bool objective = problem.policy.kind == PolicyKind::optimization_normalized &&
                         problem.direction != Direction::none && !problem.instances.empty();

  struct Sent {
    std::int64_t day;
    std::string user;
    std::optional<Status> status;   // judged records only
    std::optional<Rational> mean;   // fully accepted, objective problems
  };
  std::vector<Sent> sent;
  for (const auto& id : entry->submissions) {
    const auto& r = *state.find_submission(id);
    Sent s{utc_day(r.submission.submitted_at), r.submission.user_id, std::nullopt, std::nullopt};
    if (r.state == Lifecycle::done && r.done_kind == DoneKind::judged) {
      s.status = scoring::aggregate_status(r.judgement.outcomes, problem.policy.re_priority);
      if (objective && *s.status == Status::ACC && r.judgement.outcomes.size() == problem.instances.size()) {
        Rational sum = 0;
        for (const auto& o : r.judgement.outcomes) sum += o.score;
        s.mean = sum / static_cast<long long>(problem.instances.size());
      }
    }
    sent.push_back(std::move(s));
  }
  if (sent.empty()) return {};
  std::stable_sort(sent.begin(), sent.end(), [](const Sent& a, const Sent& b) { return a.day < b.day; });

  auto better = [&](const Rational& a, const Rational& b) {
    return problem.direction == Direction::maximize ? a > b : a < b;
  };
  std::optional<Rational> winner;
  for (const auto& s : sent) {
    if (s.mean && (!winner || better(*s.mean, *winner))) winner = s.mean;
  }

  const std::int64_t first = sent.front().day;
  const std::int64_t last = sent.back().day;
  std::vector<ReplayRow> rows;
  std::set<std::string> seen;
  std::optional<Rational> best;
  std::size_t i = 0;
  for (std::int64_t d = first; d <= last; ++d) {
    ReplayRow row;
    row.day = static_cast<int>(d - first + 1);
    std::set<std::string> today;
    for (; i < sent.size() && sent[i].day == d; ++i) {
      const auto& s = sent[i];
      today.insert(s.user);
      if (s.status == Status::ACC) ++row.correct;
      if (s.status && incorrect(*s.status)) ++row.incorrect;
      if (s.mean && (!best || better(*s.mean, *best))) best = s.mean;
    }
    row.users_total = static_cast<int>(today.size());
    for (const auto& u : today) {
      if (seen.insert(u).second) ++row.users_new;
    }
    if (best && winner) {
      const Rational& num = problem.direction == Direction::maximize ? *winner : *best;
      const Rational& den = problem.direction == Direction::maximize ? *best : *winner;
      if (den != 0) row.best_ratio = num / den;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReplayRow> replay_contest(const std::filesystem::path& journal, const std::optional<std::string>& problem_id) {
  return replay_contest(read_journal(journal), problem_id);
}

std::string replay_csv(const std::vector<ReplayRow>& rows) {
  std::string out = "day,best_ratio,correct,incorrect,users_total,users_new\n";
  for (const auto& r : rows) {
    out += std::to_string(r.day) + ',' + (r.best_ratio ? to_decimal(*r.best_ratio) : std::string()) + ',' +
           std::to_string(r.correct) + ',' + std::to_string(r.incorrect) + ',' + std::to_string(r.users_total) +
           ',' + std::to_string(r.users_new) + '\n';
  }
  return out;
}

std::string replay_svg(const std::vector<ReplayRow>& rows, const std::string& title) {
  const double width = 800, left = 60, right = 20, panel = 200, top = 40, gap = 50;
  const double plot_w = width - left - right;
  const double height = top + panel + gap + panel + 40;
  const std::size_t n = std::max<std::size_t>(rows.size(), 1);
  const double slot = plot_w / static_cast<double>(n);
  auto slot_center = [&](std::size_t i) { return left + slot * (static_cast<double>(i) + 0.5); };

  double max_ratio = 1.0;
  for (const auto& r : rows) {
    if (r.best_ratio) max_ratio = std::max(max_ratio, r.best_ratio->convert_to<double>());
  }
  if (max_ratio <= 1.0) max_ratio = 1.1;
  int max_count = 1;
  for (const auto& r : rows) max_count = std::max(max_count, r.correct + r.incorrect);

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
       "\" viewBox=\"0 0 " + fmt(width) + ' ' + fmt(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
       "</text>\n";

  // Ratio panel.
  const double y0 = top;
  auto ratio_y = [&](double v) { return y0 + panel - (v - 1.0) / (max_ratio - 1.0) * panel; };
  s += "<g class=\"best-ratio\">\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(y0 + panel) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y0 + panel) + "\" x2=\"" + fmt(left + plot_w) + "\" y2=\"" +
       fmt(y0 + panel) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(ratio_y(1.0)) + "\" text-anchor=\"end\">1.00</text>\n";
  s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(ratio_y(max_ratio) + 10) + "\" text-anchor=\"end\">" +
       fmt(max_ratio) + "</text>\n";
  s += "<text x=\"" + fmt(left) + "\" y=\"" + fmt(y0 - 8) + "\">best so far / winner</text>\n";
  std::string points;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].best_ratio) continue;
    points += fmt(slot_center(i)) + ',' + fmt(ratio_y(rows[i].best_ratio->convert_to<double>())) + ' ';
  }
  if (!points.empty()) {
    points.pop_back();
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  }
  s += "</g>\n";

  // Submission panel.
  const double y1 = top + panel + gap;
  auto count_h = [&](int c) { return static_cast<double>(c) / max_count * panel; };
  s += "<g class=\"submissions\">\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(y1 + panel) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y1 + panel) + "\" x2=\"" + fmt(left + plot_w) + "\" y2=\"" +
       fmt(y1 + panel) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y1 + 10) + "\" text-anchor=\"end\">" +
       std::to_string(max_count) + "</text>\n";
  s += "<text x=\"" + fmt(left) + "\" y=\"" + fmt(y1 - 8) +
       "\"><tspan fill=\"#2ca02c\">correct</tspan> / <tspan fill=\"#d62728\">incorrect</tspan> per day</text>\n";
  const double bar_w = slot * 0.7;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = slot_center(i) - bar_w / 2;
    const double hc = count_h(rows[i].correct), hi = count_h(rows[i].incorrect);
    const double base = y1 + panel;
    if (rows[i].correct > 0) {
      s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(base - hc) + "\" width=\"" + fmt(bar_w) + "\" height=\"" +
           fmt(hc) + "\" fill=\"#2ca02c\"/>\n";
    }
    if (rows[i].incorrect > 0) {
      s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(base - hc - hi) + "\" width=\"" + fmt(bar_w) + "\" height=\"" +
           fmt(hi) + "\" fill=\"#d62728\"/>\n";
    }
    s += "<text x=\"" + fmt(slot_center(i)) + "\" y=\"" + fmt(base + 15) + "\" text-anchor=\"middle\">" +
         std::to_string(rows[i].day) + "</text>\n";
  }
  s += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"" + fmt(height - 5) +
       "\" text-anchor=\"middle\">day</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace judge::service
