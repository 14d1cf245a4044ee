#include "judge/service/pipeline.hpp"

#include "judge/service/state.hpp"

#include <fstream>
#include <sstream>

namespace judge::service {

AggregateResult score_judgement(const Problem& problem, scoring::BestTable& best, const std::string& submission_id,
                                const eval::Judgement& judgement) {
  if (judgement.compile_error) return scoring::compile_error_result(submission_id);
  for (const auto& o : judgement.outcomes) scoring::update_best(best, o, submission_id);
  return scoring::aggregate(problem, submission_id, judgement.outcomes, &best);
}

Json result_json(const AggregateResult& result, bool with_stats) {
  Json j = result;
  if (!with_stats) {
    for (auto& o : j.at("per_instance")) o["stats"] = nullptr;
  }
  return j;
}

Json visible_result_json(const AggregateResult& result, const Problem& problem, bool with_stats) {
  Json j = result_json(result, with_stats);
  auto& per = j.at("per_instance");
  if (!problem.visibility.instance_status) {
    per = Json::array();
    return j;
  }
  for (auto& o : per) {
    if (!problem.show_instance_scores()) o["score"] = nullptr;
    if (!problem.visibility.wa_detail && o.at("status") == "WA") o["detail"] = nullptr;
  }
  return j;
}

Submission submission_from_file(const std::filesystem::path& file, const std::string& language_id) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidRequest("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Submission s;
  s.id = "local";
  s.user_id = "local";
  if (language_id == "static_binary") {
    s.payload = BinaryPayload{ss.str()};
  } else {
    s.payload = SourcePayload{language_id, {{file.filename().string(), ss.str()}}};
  }
  return s;
}

}  // namespace judge::service
