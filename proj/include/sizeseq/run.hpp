#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sizeseq/compare.hpp"
#include "sizeseq/oracle.hpp"
#include "sizeseq/parse.hpp"
#include "sizeseq/sets.hpp"

namespace sizeseq {

using ordered_json = nlohmann::ordered_json;

struct RunResult {
  int exit_code = 0;
  std::string text;
  ordered_json json;
};

namespace run_detail {

inline std::string join_counts(const std::vector<Count>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << v[i];
  }
  return os.str();
}

inline const char* sign_word(int s) {
  return s < 0 ? "less" : (s > 0 ? "greater" : "equal");
}

inline std::string classes_str(const std::vector<ClassSign>& cs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) os << ", ";
    os << detail::class_name(cs[i].residue, cs[i].period) << ": "
       << sign_word(cs[i].sign);
  }
  os << '}';
  return os.str();
}

inline std::string envelope_str(const EnvelopeCertificate& env) {
  std::ostringstream os;
  os << to_string(env.lower) << " <= sigma(n) <= " << to_string(env.upper)
     << " for n >= " << env.threshold;
  return os.str();
}

inline ordered_json sequence_json(const SizeSequence& s, Index len) {
  ordered_json r;
  r["kind_tag"] = s.kind_tag();
  r["prefix"] = s.prefix(len);
  if (s.symbolic()) r["symbolic"] = s.symbolic()->to_string();
  if (s.envelope()) r["envelope"] = envelope_str(*s.envelope());
  return r;
}

inline std::string verdict_text(const ComparisonVerdict& v) {
  std::ostringstream os;
  os << to_string(v.relation);
  if (v.relation == Relation::Unknown) {
    if (v.checked_to) os << ", checked to n=" << *v.checked_to;
    os << ": " << v.reason;
    return os.str();
  }
  if (v.witness) os << ", witness m=" << *v.witness;
  os << ": ";
  if (!v.classes.empty())
    os << "residue classes " << classes_str(v.classes);
  else
    os << v.reason;
  return os.str();
}

inline ordered_json verdict_json(const ComparisonVerdict& v) {
  ordered_json certificate;
  if (!v.classes.empty()) {
    certificate["type"] = "residue-classes";
    certificate["period"] = v.classes.front().period;
    ordered_json cls;
    for (const ClassSign& c : v.classes)
      cls[detail::class_name(c.residue, c.period)] = sign_word(c.sign);
    certificate["classes"] = cls;
  } else if (v.relation != Relation::Unknown) {
    certificate["type"] = "justification";
    certificate["detail"] = v.reason;
  }
  return certificate;
}

}  // namespace run_detail

inline RunResult run(const Query& q) {
  RunResult res;
  ordered_json& out = res.json;
  out["command"] = q.command;
  ordered_json inputs;
  {
    ordered_json exprs = ordered_json::array();
    for (const SetExprPtr& e : q.exprs) exprs.push_back(to_string(*e));
    inputs["exprs"] = exprs;
    if (q.element) inputs["element"] = to_string(*q.element);
    if (q.number) inputs["n"] = *q.number;
    if (q.command == "compare" || q.command == "verify")
      inputs["budget"] = q.budget;
    if (q.command == "size" || q.command == "prefix" || q.command == "chi")
      inputs["len"] = q.len;
  }
  out["inputs"] = inputs;

  if (q.command == "size") {
    SizeSequence s = build_set(q.exprs[0]).size();
    std::vector<Count> pre = s.prefix(q.len);
    std::ostringstream os;
    if (s.symbolic()) os << "symbolic: " << s.symbolic()->to_string() << "\n";
    if (s.envelope())
      os << "envelope: " << run_detail::envelope_str(*s.envelope()) << "\n";
    os << "prefix: " << run_detail::join_counts(pre);
    res.text = os.str();
    out["result"] = run_detail::sequence_json(s, q.len);
  } else if (q.command == "prefix") {
    SizeSequence s = build_set(q.exprs[0]).size();
    res.text = run_detail::join_counts(s.prefix(q.len));
    out["result"] = run_detail::sequence_json(s, q.len);
  } else if (q.command == "chi") {
    CalculableSet A = build_set(q.exprs[0]);
    IntSequence chi = A.characteristic();
    res.text = run_detail::join_counts(chi.prefix(q.len));
    ordered_json r;
    r["kind_tag"] = "chi(" + A.name() + ")";
    r["prefix"] = chi.prefix(q.len);
    out["result"] = r;
  } else if (q.command == "compare") {
    ComparisonVerdict v = compare_sets(q.exprs[0], q.exprs[1], q.budget);
    res.text = run_detail::verdict_text(v);
    out["result"] = to_string(v.relation);
    if (v.witness) out["witness"] = *v.witness;
    ordered_json cert = run_detail::verdict_json(v);
    if (!cert.is_null()) out["certificate"] = cert;
    if (v.checked_to) out["checked_to"] = *v.checked_to;
  } else if (q.command == "label") {
    CalculableSet A = build_set(q.exprs[0]);
    Element x = coerce(*q.element, A.universe());
    Index l = A.label_of(x);
    res.text = std::to_string(l);
    out["result"] = l;
  } else if (q.command == "block") {
    CalculableSet A = build_set(q.exprs[0]);
    std::vector<Element> blk = A.block(*q.number);
    std::ostringstream os;
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < blk.size(); ++i) {
      if (i) os << ' ';
      os << to_string(blk[i]);
      arr.push_back(to_string(blk[i]));
    }
    res.text = os.str();
    out["result"] = arr;
  } else if (q.command == "verify") {
    SizeSequence s = build_set(q.exprs[0]).size();
    std::vector<Count> engine = s.prefix(q.budget);
    std::vector<Count> witness = oracle::brute_sigma(q.exprs[0], q.budget);
    Index bad = 0;
    for (Index n = 1; n <= q.budget; ++n)
      if (engine[n - 1] != witness[n - 1]) {
        bad = n;
        break;
      }
    if (bad == 0) {
      res.text =
          "PASS (σ prefix matches oracle: " + run_detail::join_counts(engine) +
          ")";
      out["result"] = "PASS";
      out["checked_to"] = q.budget;
    } else {
      std::ostringstream os;
      os << "FAIL (σ prefix differs from oracle at n=" << bad
         << ": engine=" << engine[bad - 1] << " oracle=" << witness[bad - 1]
         << ")";
      res.text = os.str();
      out["result"] = "FAIL";
      out["witness"] = bad;
      res.exit_code = static_cast<int>(ErrorCode::verify_mismatch);
    }
  }
  return res;
}

inline RunResult run_line(const std::string& line) {
  return run(parse_query(line));
}

}  // namespace sizeseq
