#include "riker/sqlite_store.hpp"

#include <sqlite3.h>

#include <cstdio>
#include <stdexcept>

namespace riker {

namespace {

struct Db {
  sqlite3* handle = nullptr;
  explicit Db(const std::string& path, bool create) {
    int flags = create ? (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE)
                       : SQLITE_OPEN_READONLY;
    if (sqlite3_open_v2(path.c_str(), &handle, flags, nullptr) != SQLITE_OK) {
      std::string msg = handle ? sqlite3_errmsg(handle) : "open failed";
      sqlite3_close(handle);
      throw std::runtime_error("sqlite open '" + path + "': " + msg);
    }
  }
  ~Db() { sqlite3_close(handle); }
  Db(const Db&) = delete;
  Db& operator=(const Db&) = delete;

  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(handle, sql.c_str(), nullptr, nullptr, &err) !=
        SQLITE_OK) {
      std::string msg = err ? err : "exec failed";
      sqlite3_free(err);
      throw std::runtime_error("sqlite exec: " + msg + "\n" + sql);
    }
  }
};

struct Stmt {
  sqlite3_stmt* stmt = nullptr;
  Stmt(Db& db, const std::string& sql) {
    if (sqlite3_prepare_v2(db.handle, sql.c_str(), -1, &stmt, nullptr) !=
        SQLITE_OK)
      throw std::runtime_error(std::string("sqlite prepare: ") +
                               sqlite3_errmsg(db.handle));
  }
  ~Stmt() { sqlite3_finalize(stmt); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  void bind(int i, const std::string& s) {
    sqlite3_bind_text(stmt, i, s.c_str(), -1, SQLITE_TRANSIENT);
  }
  void bind(int i, std::int64_t v) { sqlite3_bind_int64(stmt, i, v); }
  void bind_null(int i) { sqlite3_bind_null(stmt, i); }
  void bind_opt(int i, const std::optional<std::string>& s) {
    if (s) bind(i, *s); else bind_null(i);
  }
  void bind_opt(int i, const std::optional<Cents>& v) {
    if (v) bind(i, static_cast<std::int64_t>(*v)); else bind_null(i);
  }
  void bind_opt_int(int i, const std::optional<int>& v) {
    if (v) bind(i, static_cast<std::int64_t>(*v)); else bind_null(i);
  }

  bool step() {
    int rc = sqlite3_step(stmt);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw std::runtime_error("sqlite step failed");
  }
  void exec_row() {
    if (step()) throw std::runtime_error("unexpected row");
    sqlite3_reset(stmt);
    sqlite3_clear_bindings(stmt);
  }

  std::string col_text(int i) {
    const unsigned char* p = sqlite3_column_text(stmt, i);
    return p ? reinterpret_cast<const char*>(p) : "";
  }
  std::int64_t col_int(int i) { return sqlite3_column_int64(stmt, i); }
  bool col_null(int i) { return sqlite3_column_type(stmt, i) == SQLITE_NULL; }
};

Date col_date(Stmt& s, int i) {
  auto d = parse_iso_date(s.col_text(i));
  if (!d) throw std::runtime_error("bad date in db: " + s.col_text(i));
  return *d;
}

constexpr const char* kSchema = R"sql(
CREATE TABLE pools (
  pool_name TEXT NOT NULL,
  position INTEGER NOT NULL,
  entity_id TEXT NOT NULL UNIQUE,
  kind TEXT NOT NULL,
  display_name TEXT NOT NULL UNIQUE,
  given_name TEXT, family_name TEXT,
  street TEXT, city TEXT, unit TEXT,
  placed INTEGER NOT NULL,
  probe_consumed INTEGER NOT NULL,
  PRIMARY KEY (pool_name, position)
);
CREATE TABLE leases (
  lease_id TEXT PRIMARY KEY,
  lessor_id TEXT NOT NULL REFERENCES pools(entity_id),
  lessee_id TEXT NOT NULL REFERENCES pools(entity_id),
  property_id TEXT NOT NULL REFERENCES pools(entity_id),
  agent_id TEXT REFERENCES pools(entity_id),
  start_date TEXT NOT NULL,
  end_date TEXT NOT NULL,
  monthly_rent INTEGER NOT NULL,
  security_deposit INTEGER NOT NULL,
  pet_deposit INTEGER,
  termination_notice_days INTEGER,
  renewal_term_months INTEGER,
  parking_fee INTEGER,
  clauses TEXT NOT NULL
);
CREATE TABLE field_reports (
  report_id TEXT PRIMARY KEY,
  agent_id TEXT NOT NULL REFERENCES pools(entity_id),
  lease_id TEXT REFERENCES leases(lease_id),
  prospect_entity_id TEXT NOT NULL REFERENCES pools(entity_id),
  report_date TEXT NOT NULL,
  calls_made INTEGER NOT NULL,
  meetings_held INTEGER NOT NULL,
  site_visits INTEGER NOT NULL,
  outcome TEXT NOT NULL
);
CREATE TABLE hr_evaluations (
  eval_id TEXT PRIMARY KEY,
  agent_id TEXT NOT NULL REFERENCES pools(entity_id),
  evaluator_id TEXT NOT NULL REFERENCES pools(entity_id),
  period_year INTEGER NOT NULL,
  period_quarter INTEGER NOT NULL,
  rating INTEGER NOT NULL,
  deals_closed INTEGER NOT NULL,
  client_meetings INTEGER NOT NULL
);
)sql";

}  // namespace

void save_store(const GroundTruthStore& store, const std::string& path) {
  std::remove(path.c_str());
  Db db(path, /*create=*/true);
  db.exec(kSchema);
  db.exec("BEGIN");

  {
    Stmt s(db,
           "INSERT INTO pools VALUES (?,?,?,?,?,?,?,?,?,?,?,?)");
    for (const auto& p : store.pools)
      for (std::size_t i = 0; i < p.members.size(); ++i) {
        const Entity& e = p.members[i];
        s.bind(1, p.pool_name);
        s.bind(2, static_cast<std::int64_t>(i));
        s.bind(3, e.id);
        s.bind(4, entity_kind_name(e.kind));
        s.bind(5, e.display_name);
        s.bind(6, e.given_name);
        s.bind(7, e.family_name);
        s.bind(8, e.street);
        s.bind(9, e.city);
        s.bind(10, e.unit);
        s.bind(11, static_cast<std::int64_t>(i < p.used_count ? 1 : 0));
        bool consumed = i >= p.used_count &&
                        i < p.used_count + p.probes_consumed;
        s.bind(12, static_cast<std::int64_t>(consumed ? 1 : 0));
        s.exec_row();
      }
  }
  {
    Stmt s(db, "INSERT INTO leases VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?)");
    for (const auto& l : store.leases) {
      s.bind(1, l.lease_id);
      s.bind(2, l.lessor_id);
      s.bind(3, l.lessee_id);
      s.bind(4, l.property_id);
      s.bind_opt(5, l.agent_id);
      s.bind(6, l.start_date.iso());
      s.bind(7, l.end_date.iso());
      s.bind(8, static_cast<std::int64_t>(l.monthly_rent));
      s.bind(9, static_cast<std::int64_t>(l.security_deposit));
      s.bind_opt(10, l.pet_deposit);
      s.bind_opt_int(11, l.termination_notice_days);
      s.bind_opt_int(12, l.renewal_term_months);
      s.bind_opt(13, l.parking_fee);
      std::string clauses;
      for (ClauseFlag c : kAllClauses)
        if (l.clauses.count(c)) {
          if (!clauses.empty()) clauses += ",";
          clauses += clause_name(c);
        }
      s.bind(14, clauses);
      s.exec_row();
    }
  }
  {
    Stmt s(db, "INSERT INTO field_reports VALUES (?,?,?,?,?,?,?,?,?)");
    for (const auto& r : store.field_reports) {
      s.bind(1, r.report_id);
      s.bind(2, r.agent_id);
      s.bind_opt(3, r.lease_id);
      s.bind(4, r.prospect_entity_id);
      s.bind(5, r.report_date.iso());
      s.bind(6, static_cast<std::int64_t>(r.calls_made));
      s.bind(7, static_cast<std::int64_t>(r.meetings_held));
      s.bind(8, static_cast<std::int64_t>(r.site_visits));
      s.bind(9, outcome_name(r.outcome));
      s.exec_row();
    }
  }
  {
    Stmt s(db, "INSERT INTO hr_evaluations VALUES (?,?,?,?,?,?,?,?)");
    for (const auto& ev : store.hr_evaluations) {
      s.bind(1, ev.eval_id);
      s.bind(2, ev.agent_id);
      s.bind(3, ev.evaluator_id);
      s.bind(4, static_cast<std::int64_t>(ev.period.year));
      s.bind(5, static_cast<std::int64_t>(ev.period.q));
      s.bind(6, static_cast<std::int64_t>(ev.rating));
      s.bind(7, static_cast<std::int64_t>(ev.deals_closed));
      s.bind(8, static_cast<std::int64_t>(ev.client_meetings));
      s.exec_row();
    }
  }
  db.exec("COMMIT");
}

GroundTruthStore load_store(const std::string& path) {
  Db db(path, /*create=*/false);
  GroundTruthStore store;

  {
    Stmt s(db, "SELECT pool_name, position, entity_id, kind, display_name, "
               "given_name, family_name, street, city, unit, placed, "
               "probe_consumed FROM pools ORDER BY rowid");
    while (s.step()) {
      std::string pool_name = s.col_text(0);
      EntityPool* pool = nullptr;
      for (auto& p : store.pools)
        if (p.pool_name == pool_name) pool = &p;
      if (!pool) {
        store.pools.push_back(EntityPool{pool_name, {}, 0, 0});
        pool = &store.pools.back();
      }
      Entity e;
      e.id = s.col_text(2);
      e.kind = entity_kind_from_name(s.col_text(3));
      e.display_name = s.col_text(4);
      e.given_name = s.col_text(5);
      e.family_name = s.col_text(6);
      e.street = s.col_text(7);
      e.city = s.col_text(8);
      e.unit = s.col_text(9);
      if (s.col_int(10)) pool->used_count = pool->members.size() + 1;
      if (s.col_int(11)) ++pool->probes_consumed;
      pool->members.push_back(std::move(e));
    }
  }
  {
    Stmt s(db, "SELECT * FROM leases ORDER BY lease_id");
    while (s.step()) {
      LeaseRecord l;
      l.lease_id = s.col_text(0);
      l.lessor_id = s.col_text(1);
      l.lessee_id = s.col_text(2);
      l.property_id = s.col_text(3);
      if (!s.col_null(4)) l.agent_id = s.col_text(4);
      l.start_date = col_date(s, 5);
      l.end_date = col_date(s, 6);
      l.monthly_rent = s.col_int(7);
      l.security_deposit = s.col_int(8);
      if (!s.col_null(9)) l.pet_deposit = s.col_int(9);
      if (!s.col_null(10))
        l.termination_notice_days = static_cast<int>(s.col_int(10));
      if (!s.col_null(11))
        l.renewal_term_months = static_cast<int>(s.col_int(11));
      if (!s.col_null(12)) l.parking_fee = s.col_int(12);
      std::string clauses = s.col_text(13);
      std::size_t pos = 0;
      while (pos < clauses.size()) {
        std::size_t comma = clauses.find(',', pos);
        std::string tok = clauses.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) l.clauses.insert(clause_from_name(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      store.leases.push_back(std::move(l));
    }
  }
  {
    Stmt s(db, "SELECT * FROM field_reports ORDER BY report_id");
    while (s.step()) {
      FieldReportRecord r;
      r.report_id = s.col_text(0);
      r.agent_id = s.col_text(1);
      if (!s.col_null(2)) r.lease_id = s.col_text(2);
      r.prospect_entity_id = s.col_text(3);
      r.report_date = col_date(s, 4);
      r.calls_made = static_cast<int>(s.col_int(5));
      r.meetings_held = static_cast<int>(s.col_int(6));
      r.site_visits = static_cast<int>(s.col_int(7));
      r.outcome = outcome_from_name(s.col_text(8));
      store.field_reports.push_back(std::move(r));
    }
  }
  {
    Stmt s(db, "SELECT * FROM hr_evaluations ORDER BY eval_id");
    while (s.step()) {
      HrEvaluationRecord ev;
      ev.eval_id = s.col_text(0);
      ev.agent_id = s.col_text(1);
      ev.evaluator_id = s.col_text(2);
      ev.period = Quarter{static_cast<int>(s.col_int(3)),
                          static_cast<int>(s.col_int(4))};
      ev.rating = static_cast<int>(s.col_int(5));
      ev.deals_closed = static_cast<int>(s.col_int(6));
      ev.client_meetings = static_cast<int>(s.col_int(7));
      store.hr_evaluations.push_back(std::move(ev));
    }
  }
  return store;
}

}  // namespace riker
